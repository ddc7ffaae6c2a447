// End-to-end checks of the carleman-dsolve binary: exit codes, artifacts,
// and bit-identical reruns.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  if (ok) {
    std::printf("[ ok ] %s\n", what.c_str());
  } else {
    std::printf("[FAIL] %s\n", what.c_str());
    ++failures;
  }
}

int run_cli(const std::string& command, const std::string& config,
            const std::string& out_dir) {
  const std::string cmd = std::string(CLI_BINARY_PATH) + " " + command +
                          " --config " + std::string(TEST_CONFIG_DIR) + "/" + config +
                          " --out " + out_dir + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Manifest comparison ignoring the wall-time field.
json masked_manifest(const fs::path& p) {
  json j = json::parse(slurp(p));
  j.erase("wall_time_ms");
  return j;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "cdsolve-cli-test";
  fs::remove_all(work);
  fs::create_directories(work);

  // solve: success, artifacts, determinism
  {
    const auto d1 = (work / "solve1").string();
    const auto d2 = (work / "solve2").string();
    check(run_cli("solve", "solve_const.json", d1) == 0, "solve exits 0");
    check(fs::exists(fs::path(d1) / "results.csv"), "solve writes results.csv");
    check(fs::exists(fs::path(d1) / "manifest.json"), "solve writes manifest.json");
    check(fs::exists(fs::path(d1) / "series_trace.csv"), "solve writes plot data");

    const std::string head = slurp(fs::path(d1) / "results.csv").substr(0, 24);
    check(head.rfind("x,re_phi,im_phi,residual", 0) == 0, "results.csv column header");

    check(run_cli("solve", "solve_const.json", d2) == 0, "solve rerun exits 0");
    check(slurp(fs::path(d1) / "results.csv") == slurp(fs::path(d2) / "results.csv"),
          "results.csv is bit-identical across reruns");
    check(slurp(fs::path(d1) / "results.json") == slurp(fs::path(d2) / "results.json"),
          "results.json is bit-identical across reruns");
    check(masked_manifest(fs::path(d1) / "manifest.json") ==
              masked_manifest(fs::path(d2) / "manifest.json"),
          "manifest matches up to wall time");

    const json res = json::parse(slurp(fs::path(d1) / "results.json"));
    check(res.at("residual_sup").get<double>() <= 1e-6, "solve residual small");

    const json man = json::parse(slurp(fs::path(d1) / "manifest.json"));
    check(man.contains("config_echo") && man.at("config_echo").contains("problem"),
          "manifest echoes the config");
  }

  // validation failure: a_1 with a strip zero
  check(run_cli("solve", "solve_badcoeff.json", (work / "bad").string()) == 2,
        "strip-zero coefficient exits 2");
  check(fs::exists(work / "bad" / "validation_report.json"),
        "validation report written");

  // q = 2 rejection
  check(run_cli("solve", "solve_q2.json", (work / "q2").string()) == 2,
        "q = 2 exits 2");

  // unreadable config
  check(run_cli("solve", "garbage.json", (work / "garbage").string()) == 1,
        "garbage config exits 1");

  // command mismatch between CLI and config
  check(run_cli("verify", "solve_const.json", (work / "mismatch").string()) == 1,
        "subcommand/config mismatch exits 1");

  // split / check-class / extend / verify / bench
  {
    const auto d = (work / "split").string();
    check(run_cli("split", "split_const.json", d) == 0, "split exits 0");
    const json res = json::parse(slurp(fs::path(d) / "results.json"));
    check(res.at("sum_check_max_error").get<double>() <= 1e-8,
          "split sum check within tolerance");
    check(res.at("decay_bound_satisfied").get<bool>(), "split decay bound holds");
  }
  check(run_cli("check-class", "check_class.json", (work / "class").string()) == 0,
        "check-class exits 0");
  {
    const json res = json::parse(slurp(work / "class" / "results.json"));
    check(res.at("logconvex_ok").get<bool>(), "check-class reports log-convexity");
  }
  check(run_cli("extend", "extend_exp.json", (work / "extend").string()) == 0,
        "extend exits 0");
  check(run_cli("verify", "verify_const.json", (work / "verify").string()) == 0,
        "verify exits 0 on the variable-coefficient instance");
  {
    const auto d = (work / "bench").string();
    check(run_cli("bench", "bench_const.json", d) == 0, "bench exits 0");
    const json res = json::parse(slurp(fs::path(d) / "bench.json"));
    check(res.contains("stage_ms") && res.at("stage_ms").contains("split") &&
              res.at("stage_ms").contains("summation") &&
              res.at("stage_ms").contains("residual"),
          "bench reports per-stage timings");
  }

  if (failures == 0) {
    std::puts("all cli checks passed");
    return 0;
  }
  std::printf("%d cli check(s) failed\n", failures);
  return 1;
}
