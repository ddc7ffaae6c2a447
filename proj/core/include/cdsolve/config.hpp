#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "cdsolve/solver.hpp"

namespace cdsolve {

struct OutputSpec {
  std::string format = "csv";  // csv | json
  std::string path = "out";    // output directory
  bool emit_plot_data = false;
};

/// A parsed run description: one command plus everything it needs. Function
/// coefficients come in as typed descriptors ({"kind":"poly",...}); the
/// closed builtin set keeps strip domains and log evaluation checkable.
struct RunConfig {
  std::string command;

  std::optional<DifferenceProblem> problem;                   // solve/verify/bench
  std::optional<std::variant<AnalyticHandle, Jet>> source;    // split/extend

  SolveOptions solve_opts;
  SplitParams split_params;  // for the standalone `split` command
  std::optional<CarlemanSequence> carleman;
  double ext_B = 1.0;
  double ext_margin = 0.25;
  std::optional<GridSpec> grid;
  double verify_tol = 1e-7;
  OutputSpec output;

  nlohmann::json echo;  // canonical round-trippable echo of the input
};

/// Builds a handle from a descriptor. strip_hint bounds rational handles'
/// pole search; entire builtins keep an infinite strip.
AnalyticHandle parse_handle(const nlohmann::json& j, double strip_hint);

/// Descriptor or {"kind":"jet_of",...} wrapper.
std::variant<AnalyticHandle, Jet> parse_chi(const nlohmann::json& j, double strip_hint);

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// %.17g, enough digits to round-trip a double bit-exactly.
std::string format_double(double v);

}  // namespace cdsolve
