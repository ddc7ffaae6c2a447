// carleman-dsolve: batch front end for the difference-equation solver.
//
// Usage: carleman-dsolve <command> --config <path> [--out <path>]
// Commands: check-class | extend | split | solve | verify | bench
//
// Exit codes: 0 success, 1 unreadable config, 2 validation failure,
// 3 non-convergence.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdsolve/config.hpp"
#include "cdsolve/extension.hpp"
#include "cdsolve/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cdsolve;

namespace {

struct CsvWriter {
  std::ofstream out;
  explicit CsvWriter(const fs::path& path) : out(path) {
    if (!out) throw std::runtime_error("cannot open " + path.string());
  }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      out << (i ? "," : "") << cols[i];
    out << "\n";
  }
  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      out << (i ? "," : "") << format_double(vals[i]);
    out << "\n";
  }
};

json grid_to_json(const GridSpec& g) {
  return json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"count", g.count},
              {"imag_offset", g.imag_offset}};
}

GridSpec grid_or(const RunConfig& cfg, GridSpec fallback) {
  return cfg.grid ? *cfg.grid : fallback;
}

int run_check_class(const RunConfig& cfg, const fs::path& dir, json& result) {
  const CarlemanSequence M =
      cfg.carleman ? *cfg.carleman : CarlemanSequence::factorial_squared(40);
  const auto d = diagnose_class(M);

  // Quasianalyticity heuristic: does the partial sum of M_n/M_{n+1} keep
  // growing over the second half of the available indices?
  double first_half = 0.0, full = d.dc_partial_sum;
  for (std::size_t n = 0; n < M.n_max() / 2; ++n)
    first_half += M.term(n) / M.term(n + 1);

  result["logconvex_ok"] = d.logconvex_ok;
  result["sup_ratio_estimate"] = d.sup_ratio_estimate;
  result["dc_partial_sum"] = d.dc_partial_sum;
  result["dc_partial_sum_first_half"] = first_half;
  result["dc_divergence_trend"] = full > 1.5 * first_half;
  result["root_growth"] = d.root_growth;

  CsvWriter csv(dir / "class_diagnostics.csv");
  csv.header({"n", "term", "root_growth"});
  for (std::size_t n = 1; n <= M.n_max(); ++n)
    csv.row({double(n), M.term(n), d.root_growth[n - 1]});
  return 0;
}

int run_extend(const RunConfig& cfg, const fs::path& dir, json& result) {
  if (!cfg.source) throw std::invalid_argument("extend: config needs a 'source'");
  Jet jet;
  if (std::holds_alternative<Jet>(*cfg.source)) {
    jet = std::get<Jet>(*cfg.source);
  } else {
    jet = jet_from_handle(std::get<AnalyticHandle>(*cfg.source), 0.5, 30);
  }
  const CarlemanSequence M =
      cfg.carleman ? *cfg.carleman : CarlemanSequence::factorial_squared(40);
  const auto ext = build_extension(jet, M, cfg.ext_B, cfg.ext_margin);

  result["bound_A"] = ext.bound_A;
  result["bound_B"] = ext.bound_B;
  result["support_radius"] = ext.support_radius;
  result["plateau_radius"] = ext.plateau_radius;
  result["n_max_limited"] = ext.n_max_limited;

  const GridSpec grid = grid_or(cfg, GridSpec(-0.9 * ext.plateau_radius,
                                              0.9 * ext.plateau_radius, 33));
  CsvWriter csv(dir / "extension.csv");
  csv.header({"x", "y", "abs_dbar", "weight", "ratio"});
  for (double x : grid.xs()) {
    for (double y : {0.05, 0.1, 0.2, 0.3}) {
      if (std::hypot(x, y) >= ext.plateau_radius) continue;
      const double ad = std::abs(ext.dbar_F(Complex(x, y)));
      const auto hm = weight_eval(M, ext.bound_B * y);
      csv.row({x, y, ad, hm.value, ad > 0.0 ? std::exp(std::log(ad) - hm.log_value) : 0.0});
    }
  }
  return 0;
}

int run_split(const RunConfig& cfg, const fs::path& dir, json& result) {
  if (!cfg.source) throw std::invalid_argument("split: config needs a 'source'");
  SplitSource src;
  if (std::holds_alternative<Jet>(*cfg.source)) {
    const CarlemanSequence M =
        cfg.carleman ? *cfg.carleman : CarlemanSequence::factorial_squared(40);
    const auto ext = build_extension(std::get<Jet>(*cfg.source), M, cfg.ext_B,
                                     cfg.ext_margin);
    src = SplitSource::from_extension(ext);
  } else {
    src = SplitSource::from_handle(std::get<AnalyticHandle>(*cfg.source));
  }
  const auto pair = split(src, cfg.split_params);

  const double rho = cfg.split_params.rho;
  const GridSpec grid = grid_or(cfg, GridSpec(-0.95 * rho, 0.95 * rho, 33));
  result["sum_check_max_error"] = split_sum_check(pair, src, grid);
  result["D0_estimate"] = pair.D0_estimate;

  std::vector<double> xs;
  for (int i = 0; i < 7; ++i) xs.push_back(rho + 0.5 + 0.5 * i);
  const auto fit = decay_check(pair, xs);
  result["decay_fitted_inner_exponent"] = fit.fitted_inner_exponent;
  result["decay_fitted_D0"] = fit.fitted_D0;
  result["decay_bound_satisfied"] = fit.bound_satisfied;
  result["decay_degenerate"] = fit.degenerate;

  CsvWriter csv(dir / "split.csv");
  csv.header({"x", "re_f_plus", "im_f_plus", "re_f_minus", "im_f_minus",
              "log_abs_f_plus", "log_abs_f_minus", "sum_error"});
  for (double x : grid.xs()) {
    const Complex z(x, grid.imag_offset);
    const Complex fp = pair.f_plus(z), fm = pair.f_minus(z);
    csv.row({x, fp.real(), fp.imag(), fm.real(), fm.imag(),
             pair.log_f_plus(z).log_magnitude, pair.log_f_minus(z).log_magnitude,
             std::abs(src.value(z) - fp - fm)});
  }
  return 0;
}

int run_solve_like(const RunConfig& cfg, const fs::path& dir, json& result,
                   bool verify, bool bench) {
  if (!cfg.problem) throw std::invalid_argument("solve: config needs a 'problem'");
  const DifferenceProblem& p = *cfg.problem;

  using clock = std::chrono::steady_clock;
  std::map<std::string, double> stage_ms;
  auto timed = [&stage_ms](const std::string& name, auto&& fn) {
    const auto t0 = clock::now();
    auto&& r = fn();
    stage_ms[name] +=
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    return std::forward<decltype(r)>(r);
  };

  const auto report = timed("validate", [&] { return validate_problem(p); });
  result["validation"] = {{"min_a1", report.min_a1},
                          {"min_aq", report.min_aq},
                          {"growth_sup_log", report.growth_sup_log},
                          {"growth_ok", report.growth_ok},
                          {"nonvanishing_ok", report.nonvanishing_ok},
                          {"notes", report.notes}};
  if (!report.pass()) {
    std::ofstream(dir / "validation_report.json") << result.dump(2) << "\n";
    std::cerr << "validation failed; report written\n";
    return 2;
  }

  const auto dc = derive_coefficients(p, cfg.solve_opts.C1, cfg.solve_opts.delta0);
  const auto rs = timed("split", [&] { return split_rhs(p, dc, cfg.solve_opts.split); });

  RecurrenceCache cache(cfg.solve_opts.cache_budget);
  SeriesSolution series;
  try {
    series = timed("summation", [&] {
      return sum_series(dc, rs.pair, cfg.solve_opts.a, cfg.solve_opts.tol,
                        cfg.solve_opts.n_cap, cache, cfg.solve_opts.grid_count);
    });
  } catch (const ConvergenceError& e) {
    result["error"] = e.what();
    result["sup_g"] = e.sup_g;
    result["sup_h"] = e.sup_h;
    std::ofstream(dir / "trace.json") << result.dump(2) << "\n";
    std::cerr << "non-convergence; trace written: " << e.what() << "\n";
    return 3;
  }

  auto phi = [&series, &dc](double x) {
    return series.g_plus_eval(x - dc.alpha1) + series.g_minus_eval(x - dc.alphaq);
  };

  result["truncation_N"] = series.truncation_N;
  result["N_a"] = series.N_a;
  result["tail_estimate"] = series.tail_estimate;
  result["split_strategy"] =
      rs.used == SplitStrategy::Partition ? "partition" : "disk";
  result["sum_identity_halfwidth"] =
      std::isfinite(rs.sum_identity_halfwidth) ? json(rs.sum_identity_halfwidth)
                                               : json("inf");
  result["notes"] = series.notes;

  const GridSpec grid =
      grid_or(cfg, GridSpec(-cfg.solve_opts.a, cfg.solve_opts.a, 129));
  double worst = 0.0;
  {
    CsvWriter csv(dir / "results.csv");
    csv.header({"x", "re_phi", "im_phi", "residual"});
    const auto t0 = clock::now();
    for (double x : grid.xs()) {
      const Complex v = phi(x);
      Complex s = 0.0;
      for (std::size_t j = 0; j < p.q(); ++j)
        s += p.coeffs[j].eval(Complex(x, 0.0)) * phi(x + p.alphas[j]);
      const double r = std::abs(s - p.chi_value(x));
      worst = std::max(worst, r);
      csv.row({x, v.real(), v.imag(), r});
    }
    stage_ms["residual"] =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  }
  result["residual_sup"] = worst;
  result["per_term_sup_g"] = series.sup_g;
  result["per_term_sup_h"] = series.sup_h;

  if (cfg.output.emit_plot_data) {
    CsvWriter csv(dir / "series_trace.csv");
    csv.header({"n", "sup_g", "sup_h", "loglog_sup_g"});
    for (std::size_t n = 0; n < series.sup_g.size(); ++n) {
      const double s = series.sup_g[n];
      const double ll = (s > 0.0 && s < 1.0) ? std::log(-std::log(s)) : 0.0;
      csv.row({double(n), s, series.sup_h[n], ll});
    }
  }

  if (bench) {
    json timings;
    for (const auto& [k, v] : stage_ms) timings[k] = v;
    result["stage_ms"] = timings;
    std::ofstream(dir / "bench.json") << result.dump(2) << "\n";
  }

  if (verify) {
    result["verify_tol"] = cfg.verify_tol;
    result["verify_pass"] = worst <= cfg.verify_tol;
    if (worst > cfg.verify_tol) {
      std::cerr << "verify: residual " << worst << " exceeds " << cfg.verify_tol
                << "\n";
      return 3;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Difference-equation solver in quasianalytic Carleman classes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  for (const char* name :
       {"check-class", "extend", "split", "solve", "verify", "bench"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_override, "output directory (overrides config)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
  } catch (const ValidationError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    const fs::path dir = out_override.empty() ? fs::path("out") : fs::path(out_override);
    std::error_code ec;
    fs::create_directories(dir, ec);
    json report{{"error", e.what()}, {"notes", e.report.notes}};
    std::ofstream(dir / "validation_report.json") << report.dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (cfg.command != command) {
    std::cerr << "config error: config command '" << cfg.command
              << "' does not match subcommand '" << command << "'\n";
    return 1;
  }

  const fs::path dir = out_override.empty() ? fs::path(cfg.output.path)
                                            : fs::path(out_override);
  std::error_code ec;
  fs::create_directories(dir, ec);

  json result;
  int code = 0;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (command == "check-class")
      code = run_check_class(cfg, dir, result);
    else if (command == "extend")
      code = run_extend(cfg, dir, result);
    else if (command == "split")
      code = run_split(cfg, dir, result);
    else
      code = run_solve_like(cfg, dir, result, command == "verify", command == "bench");
  } catch (const ValidationError& e) {
    result["error"] = e.what();
    std::ofstream(dir / "validation_report.json") << result.dump(2) << "\n";
    std::cerr << "validation failed: " << e.what() << "\n";
    code = 2;
  } catch (const std::invalid_argument& e) {
    result["error"] = e.what();
    std::ofstream(dir / "validation_report.json") << result.dump(2) << "\n";
    std::cerr << "rejected: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (cfg.output.format == "json" || !result.empty()) {
    std::ofstream(dir / "results.json") << result.dump(2) << "\n";
  }

  json manifest;
  manifest["command"] = command;
  manifest["library_version"] = kVersion;
  manifest["config_echo"] = cfg.echo;
  manifest["deterministic"] = true;  // no seeds, fixed summation order
  manifest["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
  return code;
}
