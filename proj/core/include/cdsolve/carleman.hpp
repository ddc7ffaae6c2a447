#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cdsolve/types.hpp"

namespace cdsolve {

/// A strictly positive sequence (M_n), n = 0..n_max, defining a Carleman
/// class, together with the log terms needed for overflow-safe arithmetic.
class CarlemanSequence {
 public:
  static CarlemanSequence from_terms(std::vector<double> terms);
  /// M_n = n!
  static CarlemanSequence factorial(std::size_t n_max = 40);
  /// M_n = (n!)^2
  static CarlemanSequence factorial_squared(std::size_t n_max = 40);
  /// M_n = n! * (log(n + e))^n
  static CarlemanSequence factorial_log(std::size_t n_max = 40);
  /// Resolves a builtin by config name ("factorial", "factorial_squared",
  /// "factorial_log").
  static CarlemanSequence builtin(const std::string& name, std::size_t n_max = 40);

  std::size_t n_max() const { return terms_.size() - 1; }
  double term(std::size_t n) const { return terms_.at(n); }
  double log_term(std::size_t n) const { return log_terms_.at(n); }
  /// log(M_n / n!)
  double log_normalized(std::size_t n) const;

 private:
  explicit CarlemanSequence(std::vector<double> terms);
  std::vector<double> terms_;
  std::vector<double> log_terms_;
};

/// Value of the weight H_M(x) = inf_n (M_n/n!) x^n over the available
/// indices. When the terms are still strictly decreasing at n_max the true
/// infimum lies below, so the result is flagged as an upper bound.
struct WeightValue {
  double value = 0.0;
  double log_value = 0.0;
  std::size_t argmin_index = 0;
  bool is_upper_bound = false;  // terms still decreasing at the index cap
};

WeightValue weight_eval(const CarlemanSequence& M, double x);

/// Finite-sample regularity diagnostics. dc_partial_sum is the partial sum
/// of sum M_n/M_{n+1}, the Denjoy-Carleman quasianalyticity heuristic; a
/// finite sample can suggest but never certify divergence.
struct ClassDiagnostics {
  bool logconvex_ok = false;
  double sup_ratio_estimate = 0.0;        // sup (M_{n+1}/((n+1)M_n))^{1/n}, n >= 1
  std::vector<double> root_growth;        // M_n^{1/n}, n = 1..n_max
  double dc_partial_sum = 0.0;            // sum_{n<n_max} M_n/M_{n+1}
};

ClassDiagnostics diagnose_class(const CarlemanSequence& M);

}  // namespace cdsolve
