#include <doctest.h>

#include <sstream>

#include "cdsolve/config.hpp"

using namespace cdsolve;
using nlohmann::json;

namespace {

json minimal_solve_config() {
  return json::parse(R"({
    "command": "solve",
    "problem": {
      "alphas": [-1.0, 0.0, 1.0],
      "coeffs": [
        {"kind": "const", "value": 2.0},
        {"kind": "const", "value": 1.0},
        {"kind": "const", "value": 2.0}
      ],
      "chi": {"kind": "trig", "terms": [{"fn": "cos", "omega": 1.0}]},
      "delta": 1.0,
      "C": 1.0
    },
    "numeric": {"tol": 1e-8, "a": 2.0, "C1": 2.0},
    "output": {"format": "csv", "path": "out", "emit_plot_data": true}
  })");
}

}  // namespace

TEST_CASE("run config parses the solve instance") {
  const auto cfg = parse_run_config(minimal_solve_config());
  CHECK(cfg.command == "solve");
  REQUIRE(cfg.problem.has_value());
  CHECK(cfg.problem->q() == 3);
  CHECK(cfg.problem->delta == 1.0);
  CHECK(cfg.solve_opts.tol == 1e-8);
  REQUIRE(cfg.solve_opts.C1.has_value());
  CHECK(*cfg.solve_opts.C1 == 2.0);
  CHECK(cfg.output.emit_plot_data);
  CHECK(std::abs(cfg.problem->chi_value(0.5) - Complex(std::cos(0.5), 0.0)) < 1e-15);
}

TEST_CASE("manifest echo re-parses to an equivalent config") {
  const auto j = minimal_solve_config();
  const auto cfg = parse_run_config(j);
  const auto cfg2 = parse_run_config(cfg.echo);
  CHECK(cfg2.command == cfg.command);
  CHECK(cfg2.solve_opts.tol == cfg.solve_opts.tol);
  CHECK(cfg2.problem->alphas == cfg.problem->alphas);
  CHECK(cfg2.echo.dump() == cfg.echo.dump());
}

TEST_CASE("unknown command and bad format are rejected") {
  auto j = minimal_solve_config();
  j["command"] = "frobnicate";
  CHECK_THROWS_AS(parse_run_config(j), std::invalid_argument);

  auto j2 = minimal_solve_config();
  j2["output"]["format"] = "xml";
  CHECK_THROWS_AS(parse_run_config(j2), std::invalid_argument);
}

TEST_CASE("q = 2 problems are rejected as validation failures at parse time") {
  auto j = minimal_solve_config();
  j["problem"]["alphas"] = {0.0, 1.0};
  j["problem"]["coeffs"] = {json{{"kind", "const"}, {"value", 1.0}},
                            json{{"kind", "const"}, {"value", 2.0}}};
  CHECK_THROWS_AS(parse_run_config(j), ValidationError);
}

TEST_CASE("rational chi with a pole in the strip is rejected") {
  auto j = minimal_solve_config();
  // 1/(1+z^2): poles at +-i, inside delta = 1.0? |Im| = 1 is the boundary;
  // use delta = 1.2 to put them strictly inside.
  j["problem"]["delta"] = 1.2;
  j["problem"]["chi"] = json{{"kind", "rational"},
                             {"num", {1.0}},
                             {"den", {1.0, 0.0, 1.0}}};
  CHECK_THROWS_AS(parse_run_config(j), ValidationError);
}

TEST_CASE("handle descriptors cover the builtin set") {
  const double strip = 0.5;
  CHECK(std::abs(parse_handle(json{{"kind", "const"}, {"value", {1.0, -2.0}}}, strip)
                     .eval(Complex(0, 0)) -
                 Complex(1.0, -2.0)) < 1e-15);
  CHECK(std::abs(parse_handle(json{{"kind", "poly"}, {"coeffs", {1.0, 0.0, 2.0}}}, strip)
                     .eval(Complex(3.0, 0)) -
                 Complex(19.0, 0)) < 1e-15);
  CHECK(std::abs(parse_handle(json{{"kind", "exp"}, {"omega", 2.0}}, strip)
                     .eval(Complex(0.0, 0.5)) -
                 Complex(std::exp(-1.0), 0)) < 1e-15);
  const auto rat = parse_handle(
      json{{"kind", "rational"}, {"num", {1.0}}, {"den", {2.0, 1.0}}, {"strip", 0.5}},
      strip);
  CHECK(std::abs(rat.eval(Complex(1.0, 0)) - Complex(1.0 / 3.0, 0)) < 1e-15);
  CHECK_THROWS_AS(parse_handle(json{{"kind", "wavelet"}}, strip), std::invalid_argument);
}

TEST_CASE("jet_of descriptor builds a working jet") {
  const auto chi = parse_chi(json{{"kind", "jet_of"},
                                  {"handle", json{{"kind", "exp"}, {"omega", 1.0}}},
                                  {"halfwidth", 0.5},
                                  {"n_max", 12},
                                  {"radius", 0.7}},
                             0.5);
  REQUIRE(std::holds_alternative<Jet>(chi));
  const Jet& jet = std::get<Jet>(chi);
  CHECK(jet.n_max == 12);
  CHECK(std::abs(jet.deriv(1, 0.0) - Complex(0.0, 1.0)) < 1e-10);
}

TEST_CASE("format_double round-trips doubles exactly") {
  for (double v : {1.0 / 3.0, 2.5e-17, -3.141592653589793, 1e300, 0.1}) {
    std::stringstream ss(format_double(v));
    double back;
    ss >> back;
    CHECK(back == v);
  }
}

TEST_CASE("area_nodes accepts a scalar or a pair") {
  auto j = minimal_solve_config();
  j["numeric"]["area_nodes"] = 24;
  CHECK(parse_run_config(j).split_params.area_nodes_radial == 24);
  CHECK(parse_run_config(j).split_params.area_nodes_angular == 24);
  j["numeric"]["area_nodes"] = {16, 48};
  CHECK(parse_run_config(j).split_params.area_nodes_radial == 16);
  CHECK(parse_run_config(j).split_params.area_nodes_angular == 48);
}
