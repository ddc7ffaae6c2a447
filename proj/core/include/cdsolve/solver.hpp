#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "cdsolve/carleman.hpp"
#include "cdsolve/funcmodel.hpp"
#include "cdsolve/splitting.hpp"
#include "cdsolve/types.hpp"

namespace cdsolve {

/// The equation instance: sum_{j=1..q} a_j(x) phi(x + alpha_j) = chi(x),
/// with a_1, a_q nonvanishing on the strip R_delta and the growth constant C.
struct DifferenceProblem {
  std::vector<double> alphas;          // strictly increasing, size q >= 3
  std::vector<AnalyticHandle> coeffs;  // a_j, holomorphic on R_delta
  std::variant<AnalyticHandle, Jet> chi;
  double delta = 0.5;
  double C = 1.0;

  std::size_t q() const { return alphas.size(); }
  Complex chi_value(double x) const;
  bool chi_is_analytic() const { return std::holds_alternative<AnalyticHandle>(chi); }
};

/// Structural checks happen here; q <= 2 is rejected as out of the
/// theorem's hypothesis (those cases were settled separately).
DifferenceProblem make_difference_problem(std::vector<double> alphas,
                                          std::vector<AnalyticHandle> coeffs,
                                          std::variant<AnalyticHandle, Jet> chi,
                                          double delta, double C);

struct ValidationReport {
  bool structure_ok = false;
  bool nonvanishing_ok = false;
  bool growth_ok = false;  // advisory: sampled sup stable under grid widening
  double min_a1 = 0.0;
  double min_aq = 0.0;
  double growth_sup_log = 0.0;       // log of the sampled growth-expression sup
  double growth_sup_log_wide = 0.0;  // same on a grid of twice the width
  std::vector<std::string> notes;

  bool pass() const { return structure_ok && nonvanishing_ok; }
};

/// Samples min |a_1|, min |a_q| and the growth-condition expression over a
/// strip grid (log scale). Growth violations are advisory, not fatal: no
/// finite sample decides a sup over an unbounded strip.
ValidationReport validate_problem(const DifferenceProblem& p,
                                  const GridSpec& grid = GridSpec(-4.0, 4.0, 81));

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& msg, ValidationReport r)
      : std::runtime_error(msg), report(std::move(r)) {}
  ValidationReport report;
};

/// beta_j = alpha_j - alpha_1 (j = 2..q), gamma_j = alpha_q - alpha_j
/// (j = 1..q-1), b_j = -a_j/a_1, c_j = -a_j/a_q, and the split constants
/// C1 > C, 0 < delta0 < min(delta, pi/(2 C1)).
struct DerivedCoefficients {
  std::vector<double> betas;        // size q-1, betas[0] = beta_2
  std::vector<double> gammas;       // size q-1, gammas[0] = gamma_1
  std::vector<AnalyticHandle> b;    // size q-1, b[0] = b_2
  std::vector<AnalyticHandle> c;    // size q-1, c[0] = c_1
  AnalyticHandle a1;
  AnalyticHandle aq;
  double C1 = 2.0;
  double delta0 = 0.25;
  double alpha1 = 0.0;
  double alphaq = 0.0;
};

DerivedCoefficients derive_coefficients(const DifferenceProblem& p,
                                        std::optional<double> C1 = std::nullopt,
                                        std::optional<double> delta0 = std::nullopt);

enum class SplitStrategy {
  Auto,       // analytic chi -> Partition, jet chi -> Disk
  Disk,       // weighted Cauchy-Pompeiu on the disk of radius delta0
  Partition,  // exact kernel partition of unity (analytic chi only)
};

struct RhsSplitOptions {
  SplitStrategy strategy = SplitStrategy::Auto;
  std::size_t contour_nodes = 64;
  std::size_t area_nodes_radial = 32;
  std::size_t area_nodes_angular = 32;
  /// Jet path: Carleman class and extension parameters.
  std::optional<CarlemanSequence> carleman;  // default: factorial_squared(40)
  double ext_B = 1.0;
  double ext_margin = 0.25;

  /// Partition path: one-sided series inversion picks up bounded homogeneous
  /// solutions (the equation is not uniquely solvable). Widening the split
  /// transition with a Kaiser window cancels those pickups as long as the
  /// resonant frequencies sit at least resonance_gap away from the forcing
  /// frequencies, which selects the canonical bounded solution. Disable to
  /// get the bare kernel switch.
  bool suppress_resonances = true;
  double resonance_gap = 0.5;
  double window_beta = 18.0;
  double window_step = 0.5;
};

struct RhsSplit {
  SplitPair pair;
  SplitStrategy used = SplitStrategy::Disk;
  /// Halfwidth of the interval where chi_plus + chi_minus reproduces chi:
  /// delta0 for the disk split, infinite for the partition split. Outside
  /// it the disk-split sum vanishes instead, so residuals are only
  /// meaningful inside.
  double sum_identity_halfwidth = 0.0;
};

RhsSplit split_rhs(const DifferenceProblem& p, const DerivedCoefficients& dc,
                   const RhsSplitOptions& opts = {});

/// Memo cache for the shift recurrences, keyed by (side, level, quantized
/// point); quantization at 1e-13 collapses reassociated shift sums.
class RecurrenceCache {
 public:
  explicit RecurrenceCache(std::size_t max_entries = 4000000)
      : max_entries_(max_entries) {}
  std::size_t size() const;
  std::size_t max_entries() const { return max_entries_; }

 private:
  friend class RecurrenceEngine;
  struct Impl;
  std::shared_ptr<Impl> impl_ = make_impl();
  std::size_t max_entries_;
  static std::shared_ptr<Impl> make_impl();
};

/// g_0 = chi_plus/a_1, g_{n+1}(z) = sum_j b_j(z) g_n(z + beta_j).
Complex g_recurrence_eval(std::size_t n, Complex z, const DerivedCoefficients& dc,
                          const SplitPair& chi_split, RecurrenceCache& cache);

/// h_0 = chi_minus/a_q, h_{n+1}(z) = sum_j c_j(z) h_n(z - gamma_j).
Complex h_recurrence_eval(std::size_t n, Complex z, const DerivedCoefficients& dc,
                          const SplitPair& chi_split, RecurrenceCache& cache);

/// Smallest n >= 1 with n beta_2 > a + delta0, n gamma_{q-1} > a + delta0
/// and (beta_2 + gamma_{q-1}) n >= a: beyond it every shift sum leaves the
/// split's support interval and the double-exponential tail regime starts.
std::size_t compute_Na(double a, const DerivedCoefficients& dc);

struct SeriesSolution {
  /// Series sums G_plus = sum g_n and G_minus = sum h_n restricted to R
  /// (direct recursive evaluation, no interpolation).
  std::function<Complex(double)> g_plus_eval;
  std::function<Complex(double)> g_minus_eval;
  std::size_t truncation_N = 0;
  std::vector<double> sup_g;  // sup over the working grid, per level
  std::vector<double> sup_h;
  double tail_estimate = 0.0;
  double interval_halfwidth = 0.0;
  std::size_t N_a = 0;
  std::vector<std::string> notes;
};

/// Accumulates both series on a working grid over [-a, a], stopping once the
/// per-term sups stay below tol for two consecutive levels past N_a and the
/// extrapolated tail is below tol. Throws ConvergenceError at n_cap.
SeriesSolution sum_series(const DerivedCoefficients& dc, const SplitPair& chi_split,
                          double a, double tol, std::size_t n_cap,
                          RecurrenceCache& cache, std::size_t grid_count = 129);

struct SolveOptions {
  std::optional<double> C1;
  std::optional<double> delta0;
  double a = 2.0;  // solve / verify interval halfwidth
  double tol = 1e-8;
  std::size_t n_cap = 64;
  std::size_t grid_count = 129;
  std::size_t cache_budget = 4000000;
  RhsSplitOptions split;
};

struct Solution {
  /// phi(x) = G_plus(x - alpha_1) + G_minus(x - alpha_q); the base shifts
  /// make the telescoping against the recurrences come out to chi_plus +
  /// chi_minus exactly.
  std::function<Complex(double)> phi;
  SeriesSolution series;
  DerivedCoefficients dc;
  ValidationReport validation;
  SplitStrategy used_strategy = SplitStrategy::Disk;
  double sum_identity_halfwidth = 0.0;
};

/// Full pipeline: validate, derive, split, sum. Throws ValidationError when
/// the problem fails its hard checks.
Solution solve(const DifferenceProblem& p, const SolveOptions& opts = {});

/// max over the grid of |sum_j a_j(x) phi(x + alpha_j) - chi(x)|.
double residual(const DifferenceProblem& p, const std::function<Complex(double)>& phi,
                const GridSpec& grid);

/// Exact solution phi(x) = e^{i omega x} / sum_j a_j e^{i omega alpha_j} for
/// constant real coefficients and chi(x) = e^{i omega x}. Throws
/// std::domain_error when the symbol vanishes.
std::function<Complex(double)> oracle_constant_coeff(const std::vector<double>& a,
                                                     const std::vector<double>& alphas,
                                                     double omega);

}  // namespace cdsolve
