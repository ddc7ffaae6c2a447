#include "cdsolve/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace cdsolve {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument("config: expected a number or [re, im] pair");
}

std::vector<Complex> parse_complex_list(const json& j) {
  std::vector<Complex> v;
  for (const auto& e : j) v.push_back(parse_complex(e));
  return v;
}

Jet parse_jet(const json& j, double strip_hint) {
  AnalyticHandle base = parse_handle(j.at("handle"), strip_hint);
  const double halfwidth = j.at("halfwidth").get<double>();
  const std::size_t n_max = j.at("n_max").get<std::size_t>();
  const double radius = j.value("radius", 0.0);
  const std::size_t nodes = j.value("nodes", std::size_t(64));
  return jet_from_handle(base, halfwidth, n_max, radius, nodes);
}

CarlemanSequence parse_carleman(const json& j) {
  const std::string kind = j.value("kind", "factorial_squared");
  if (kind == "explicit") {
    std::vector<double> terms = j.at("terms").get<std::vector<double>>();
    return CarlemanSequence::from_terms(std::move(terms));
  }
  return CarlemanSequence::builtin(kind, j.value("n_max", std::size_t(40)));
}

GridSpec parse_grid(const json& j) {
  return GridSpec(j.at("x_min").get<double>(), j.at("x_max").get<double>(),
                  j.at("count").get<std::size_t>(), j.value("imag_offset", 0.0));
}

SplitStrategy parse_strategy(const std::string& s) {
  if (s == "auto") return SplitStrategy::Auto;
  if (s == "disk") return SplitStrategy::Disk;
  if (s == "partition") return SplitStrategy::Partition;
  throw std::invalid_argument("config: unknown split_strategy '" + s + "'");
}

}  // namespace

AnalyticHandle parse_handle(const json& j, double strip_hint) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "const") return handles::constant(parse_complex(j.at("value")));
  if (kind == "poly") return handles::polynomial(parse_complex_list(j.at("coeffs")));
  if (kind == "exp") return handles::exp_i_omega(j.at("omega").get<double>());
  if (kind == "trig") {
    std::vector<handles::TrigTerm> terms;
    for (const auto& t : j.at("terms")) {
      handles::TrigTerm term;
      const std::string fn = t.at("fn").get<std::string>();
      if (fn == "cos")
        term.fn = handles::TrigTerm::Fn::Cos;
      else if (fn == "sin")
        term.fn = handles::TrigTerm::Fn::Sin;
      else
        throw std::invalid_argument("config: trig fn must be cos or sin");
      term.omega = t.at("omega").get<double>();
      term.amplitude = t.contains("amplitude") ? parse_complex(t.at("amplitude")) : 1.0;
      terms.push_back(term);
    }
    const Complex offset = j.contains("offset") ? parse_complex(j.at("offset")) : 0.0;
    return handles::trig(offset, std::move(terms));
  }
  if (kind == "rational") {
    const double strip = j.value("strip", strip_hint);
    return handles::rational(parse_complex_list(j.at("num")),
                             parse_complex_list(j.at("den")), strip);
  }
  throw std::invalid_argument("config: unknown handle kind '" + kind + "'");
}

std::variant<AnalyticHandle, Jet> parse_chi(const json& j, double strip_hint) {
  if (j.at("kind").get<std::string>() == "jet_of") return parse_jet(j, strip_hint);
  return parse_handle(j, strip_hint);
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  cfg.command = j.at("command").get<std::string>();
  static const std::set<std::string> kCommands = {"check-class", "extend", "split",
                                                  "solve", "verify", "bench"};
  if (!kCommands.count(cfg.command))
    throw std::invalid_argument("config: unrecognized command '" + cfg.command + "'");

  if (j.contains("problem")) {
    const json& pj = j.at("problem");
    const double delta = pj.at("delta").get<double>();
    // Rejections here are problem validation failures, not config syntax
    // errors; wrap them so the CLI can exit with the validation code.
    try {
      std::vector<AnalyticHandle> coeffs;
      for (const auto& cj : pj.at("coeffs")) coeffs.push_back(parse_handle(cj, delta));
      cfg.problem = make_difference_problem(
          pj.at("alphas").get<std::vector<double>>(), std::move(coeffs),
          parse_chi(pj.at("chi"), delta), delta, pj.at("C").get<double>());
    } catch (const std::invalid_argument& e) {
      ValidationReport r;
      r.notes.push_back(e.what());
      throw ValidationError(e.what(), std::move(r));
    } catch (const std::domain_error& e) {
      ValidationReport r;
      r.notes.push_back(e.what());
      throw ValidationError(e.what(), std::move(r));
    }
  }

  if (j.contains("source")) {
    const double strip = j.value("numeric", json::object()).value("rho", 0.5) * 8.0;
    cfg.source = parse_chi(j.at("source"), strip);
  }

  if (j.contains("carleman")) cfg.carleman = parse_carleman(j.at("carleman"));

  if (j.contains("extension")) {
    cfg.ext_B = j.at("extension").value("B", 1.0);
    cfg.ext_margin = j.at("extension").value("cutoff_margin", 0.25);
  }

  if (j.contains("numeric")) {
    const json& n = j.at("numeric");
    if (n.contains("C1")) cfg.solve_opts.C1 = n.at("C1").get<double>();
    if (n.contains("delta0")) cfg.solve_opts.delta0 = n.at("delta0").get<double>();
    cfg.solve_opts.a = n.value("a", 2.0);
    cfg.solve_opts.tol = n.value("tol", 1e-8);
    cfg.solve_opts.n_cap = n.value("n_cap", std::size_t(64));
    cfg.solve_opts.grid_count = n.value("grid_count", std::size_t(129));
    cfg.verify_tol = n.value("verify_tol", 10.0 * cfg.solve_opts.tol);

    cfg.split_params.rho = n.value("rho", 0.5);
    cfg.split_params.C0 = n.value("C0", 1.0);
    cfg.split_params.contour_nodes = n.value("contour_nodes", std::size_t(64));
    if (n.contains("area_nodes")) {
      const json& an = n.at("area_nodes");
      if (an.is_array() && an.size() == 2) {
        cfg.split_params.area_nodes_radial = an[0].get<std::size_t>();
        cfg.split_params.area_nodes_angular = an[1].get<std::size_t>();
      } else {
        cfg.split_params.area_nodes_radial = an.get<std::size_t>();
        cfg.split_params.area_nodes_angular = cfg.split_params.area_nodes_radial;
      }
    }
    cfg.solve_opts.split.contour_nodes = cfg.split_params.contour_nodes;
    cfg.solve_opts.split.area_nodes_radial = cfg.split_params.area_nodes_radial;
    cfg.solve_opts.split.area_nodes_angular = cfg.split_params.area_nodes_angular;
    cfg.solve_opts.split.ext_B = cfg.ext_B;
    cfg.solve_opts.split.ext_margin = cfg.ext_margin;
    if (cfg.carleman) cfg.solve_opts.split.carleman = cfg.carleman;
    if (n.contains("split_strategy"))
      cfg.solve_opts.split.strategy = parse_strategy(n.at("split_strategy").get<std::string>());
    if (n.contains("grid")) cfg.grid = parse_grid(n.at("grid"));
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    cfg.output.format = o.value("format", "csv");
    cfg.output.path = o.value("path", "out");
    cfg.output.emit_plot_data = o.value("emit_plot_data", false);
    if (cfg.output.format != "csv" && cfg.output.format != "json")
      throw std::invalid_argument("config: output.format must be csv or json");
  }

  cfg.echo = j;  // nlohmann objects iterate in sorted key order: canonical
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return parse_run_config(j);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace cdsolve
