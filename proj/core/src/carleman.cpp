#include "cdsolve/carleman.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdsolve {

namespace {
constexpr std::size_t kMinTerms = 9;  // n_max >= 8

double log_factorial(std::size_t n) { return std::lgamma(double(n) + 1.0); }
}  // namespace

CarlemanSequence::CarlemanSequence(std::vector<double> terms)
    : terms_(std::move(terms)) {
  if (terms_.size() < kMinTerms)
    throw std::invalid_argument("CarlemanSequence: need n_max >= 8 (at least 9 terms)");
  log_terms_.reserve(terms_.size());
  for (double m : terms_) {
    if (!(m > 0.0) || !std::isfinite(m))
      throw std::invalid_argument("CarlemanSequence: terms must be finite and > 0");
    log_terms_.push_back(std::log(m));
  }
}

CarlemanSequence CarlemanSequence::from_terms(std::vector<double> terms) {
  return CarlemanSequence(std::move(terms));
}

CarlemanSequence CarlemanSequence::factorial(std::size_t n_max) {
  std::vector<double> t(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) t[n] = std::exp(log_factorial(n));
  return CarlemanSequence(std::move(t));
}

CarlemanSequence CarlemanSequence::factorial_squared(std::size_t n_max) {
  std::vector<double> t(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) t[n] = std::exp(2.0 * log_factorial(n));
  return CarlemanSequence(std::move(t));
}

CarlemanSequence CarlemanSequence::factorial_log(std::size_t n_max) {
  std::vector<double> t(n_max + 1);
  const double e = std::exp(1.0);
  for (std::size_t n = 0; n <= n_max; ++n)
    t[n] = std::exp(log_factorial(n) + double(n) * std::log(std::log(double(n) + e)));
  return CarlemanSequence(std::move(t));
}

CarlemanSequence CarlemanSequence::builtin(const std::string& name, std::size_t n_max) {
  if (name == "factorial") return factorial(n_max);
  if (name == "factorial_squared") return factorial_squared(n_max);
  if (name == "factorial_log") return factorial_log(n_max);
  throw std::invalid_argument("unknown Carleman builtin: " + name);
}

double CarlemanSequence::log_normalized(std::size_t n) const {
  return log_terms_.at(n) - log_factorial(n);
}

WeightValue weight_eval(const CarlemanSequence& M, double x) {
  if (!(x > 0.0)) throw std::domain_error("weight_eval: x > 0 required");
  const double logx = std::log(x);
  WeightValue best;
  best.log_value = std::numeric_limits<double>::infinity();
  double last_log_term = 0.0;
  for (std::size_t n = 0; n <= M.n_max(); ++n) {
    const double lt = M.log_normalized(n) + double(n) * logx;
    if (lt < best.log_value) {  // strict: ties keep the smallest index
      best.log_value = lt;
      best.argmin_index = n;
    }
    if (n == M.n_max() && M.n_max() > 0)
      best.is_upper_bound = (best.argmin_index == M.n_max()) &&
                            (lt < last_log_term);
    last_log_term = lt;
  }
  best.value = std::exp(best.log_value);
  return best;
}

ClassDiagnostics diagnose_class(const CarlemanSequence& M) {
  ClassDiagnostics d;
  const std::size_t N = M.n_max();

  // Log-convexity of M_n/n!, checked in log scale with a small slack for
  // rounding (the factorial sequence sits exactly on the equality case).
  d.logconvex_ok = true;
  for (std::size_t n = 0; n + 2 <= N; ++n) {
    const double lhs = 2.0 * M.log_normalized(n + 1);
    const double rhs = M.log_normalized(n) + M.log_normalized(n + 2);
    if (lhs > rhs + 1e-10 * (1.0 + std::abs(rhs))) {
      d.logconvex_ok = false;
      break;
    }
  }

  d.sup_ratio_estimate = 0.0;
  for (std::size_t n = 1; n + 1 <= N; ++n) {
    const double lr =
        (M.log_term(n + 1) - std::log(double(n + 1)) - M.log_term(n)) / double(n);
    d.sup_ratio_estimate = std::max(d.sup_ratio_estimate, std::exp(lr));
  }

  d.root_growth.reserve(N);
  for (std::size_t n = 1; n <= N; ++n)
    d.root_growth.push_back(std::exp(M.log_term(n) / double(n)));

  d.dc_partial_sum = 0.0;
  for (std::size_t n = 0; n < N; ++n)
    d.dc_partial_sum += std::exp(M.log_term(n) - M.log_term(n + 1));

  return d;
}

}  // namespace cdsolve
