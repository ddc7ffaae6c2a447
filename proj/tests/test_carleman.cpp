#include <doctest.h>

#include <cmath>

#include "cdsolve/carleman.hpp"

using namespace cdsolve;

TEST_CASE("weight of factorial class at x = 2: terms increase from n = 0") {
  const auto M = CarlemanSequence::factorial(20);
  const auto w = weight_eval(M, 2.0);
  CHECK(w.argmin_index == 0);
  CHECK(w.value == doctest::Approx(1.0));
  CHECK_FALSE(w.is_upper_bound);
}

TEST_CASE("weight of (n!)^2 at x = 0.1 matches a brute-force scan") {
  // Oracle: min over n = 0..20 of n! * 0.1^n, scanned directly.
  double best = 1e300;
  std::size_t best_n = 0;
  double fact = 1.0;
  for (std::size_t n = 0; n <= 20; ++n) {
    if (n > 0) fact *= double(n);
    const double term = fact * std::pow(0.1, double(n));
    if (term < best) {
      best = term;
      best_n = n;
    }
  }
  CHECK(best_n == 9);
  CHECK(best == doctest::Approx(3.6288e-4).epsilon(1e-6));

  const auto M = CarlemanSequence::factorial_squared(20);
  const auto w = weight_eval(M, 0.1);
  CHECK(w.argmin_index == best_n);
  CHECK(w.value == doctest::Approx(best).epsilon(1e-12));
  CHECK_FALSE(w.is_upper_bound);
}

TEST_CASE("weight flagged as upper bound while terms still decrease at the cap") {
  const auto M = CarlemanSequence::factorial(40);
  const auto w = weight_eval(M, 0.5);
  CHECK(w.argmin_index == 40);
  CHECK(w.value == doctest::Approx(std::pow(0.5, 40)).epsilon(1e-12));
  CHECK(w.is_upper_bound);
}

TEST_CASE("weight rejects bad input") {
  const auto M = CarlemanSequence::factorial(10);
  CHECK_THROWS_AS(weight_eval(M, 0.0), std::domain_error);
  CHECK_THROWS_AS(weight_eval(M, -1.0), std::domain_error);
  CHECK_THROWS_AS(CarlemanSequence::from_terms({1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(CarlemanSequence::from_terms(
                      {1.0, 1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("weight properties: monotone in x, capped by M_0, scales linearly") {
  const auto M = CarlemanSequence::factorial_squared(24);
  double prev = 0.0;
  for (double x : {0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 10.0}) {
    const auto w = weight_eval(M, x);
    CHECK(w.value >= prev);
    CHECK(w.value <= M.term(0) * (1.0 + 1e-12));
    prev = w.value;
  }

  std::vector<double> scaled;
  for (std::size_t n = 0; n <= 24; ++n) scaled.push_back(3.5 * M.term(n));
  const auto Ms = CarlemanSequence::from_terms(scaled);
  for (double x : {0.05, 0.3, 1.7}) {
    const auto w = weight_eval(M, x);
    const auto ws = weight_eval(Ms, x);
    CHECK(ws.argmin_index == w.argmin_index);
    CHECK(ws.value == doctest::Approx(3.5 * w.value).epsilon(1e-12));
  }
}

TEST_CASE("diagnostics: factorial sits on the log-convexity equality case") {
  const auto d = diagnose_class(CarlemanSequence::factorial(24));
  CHECK(d.logconvex_ok);
  CHECK(d.sup_ratio_estimate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("diagnostics: (n!)^2 is log-convex with strictly increasing roots") {
  const auto d = diagnose_class(CarlemanSequence::factorial_squared(24));
  CHECK(d.logconvex_ok);
  for (std::size_t i = 0; i + 1 < d.root_growth.size(); ++i)
    CHECK(d.root_growth[i] < d.root_growth[i + 1]);
  CHECK(d.dc_partial_sum > 0.0);
}

TEST_CASE("diagnostics: alternating sequence fails log-convexity at n = 0") {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(i % 2 == 0 ? 1.0 : 10.0);
  const auto d = diagnose_class(CarlemanSequence::from_terms(t));
  CHECK_FALSE(d.logconvex_ok);
}

TEST_CASE("diagnostics are deterministic") {
  const auto M = CarlemanSequence::factorial_log(16);
  const auto d1 = diagnose_class(M);
  const auto d2 = diagnose_class(M);
  CHECK(d1.sup_ratio_estimate == d2.sup_ratio_estimate);
  CHECK(d1.dc_partial_sum == d2.dc_partial_sum);
  CHECK(d1.root_growth == d2.root_growth);
}

TEST_CASE("builtin lookup") {
  CHECK(CarlemanSequence::builtin("factorial", 12).term(3) == doctest::Approx(6.0));
  CHECK(CarlemanSequence::builtin("factorial_squared", 12).term(3) == doctest::Approx(36.0));
  CHECK_THROWS_AS(CarlemanSequence::builtin("nope", 12), std::invalid_argument);
}
