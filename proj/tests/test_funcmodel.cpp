#include <doctest.h>

#include <cmath>

#include "cdsolve/funcmodel.hpp"

using namespace cdsolve;

namespace {

AnalyticHandle square_handle() {
  AnalyticHandle h;
  h.eval = [](Complex z) { return z * z; };
  return h;
}

// 1/(2+z) as a plain closure: its pole sits on the real axis at -2, so it
// lives on no full strip, but circle quadrature around x = 1 never sees it.
AnalyticHandle shifted_reciprocal() {
  AnalyticHandle h;
  h.strip_halfwidth = 1.9;
  h.eval = [](Complex z) { return 1.0 / (2.0 + z); };
  return h;
}

// e^{-e^z}, with the analytic log path that survives where the linear value
// underflows.
AnalyticHandle exp_neg_exp_handle() {
  AnalyticHandle h;
  h.eval = [](Complex z) { return std::exp(-std::exp(z)); };
  h.log_eval = [](Complex z) {
    const Complex w = -std::exp(z);
    return LogValue{w.real(), wrap_phase(w.imag())};
  };
  return h;
}

}  // namespace

TEST_CASE("cauchy derivative: second derivative of z^2 is 2") {
  const Complex d = derivative_via_cauchy(square_handle(), 0.0, 2, 0.5);
  CHECK(std::abs(d - Complex(2.0, 0.0)) < 1e-12);
}

TEST_CASE("cauchy derivative: (e^{iz})' at 0 is i") {
  const Complex d = derivative_via_cauchy(handles::exp_i_omega(1.0), 0.0, 1, 0.5);
  CHECK(std::abs(d - Complex(0.0, 1.0)) < 1e-12);
}

TEST_CASE("cauchy derivative: third derivative of 1/(2+z) at 1") {
  // Closed form: -3!/(2+x)^4 = -6/81.
  const auto f = shifted_reciprocal();
  const Complex d = derivative_via_cauchy(f, 1.0, 3, 0.5, 64);
  CHECK(std::abs(d - Complex(-6.0 / 81.0, 0.0)) < 1e-10);
}

TEST_CASE("cauchy derivative with n = 0 reproduces the value") {
  const auto f = shifted_reciprocal();
  const Complex v = derivative_via_cauchy(f, 0.3, 0, 0.5, 64);
  CHECK(std::abs(v - f.eval(Complex(0.3, 0.0))) < 1e-12);
}

TEST_CASE("cauchy derivative error drops at least 10x from 32 to 64 nodes") {
  const auto f = shifted_reciprocal();
  // Centering near the pole keeps 32 nodes above the floating-point floor.
  const double exact = -6.0;  // -3!/(2+x)^4 at x = -1
  const double e32 = std::abs(derivative_via_cauchy(f, -1.0, 3, 0.9, 32).real() - exact);
  const double e64 = std::abs(derivative_via_cauchy(f, -1.0, 3, 0.9, 64).real() - exact);
  CHECK(e32 > 1e-13);
  CHECK(e64 * 10.0 <= e32);
}

TEST_CASE("cauchy derivative rejects a radius reaching the strip boundary") {
  const auto f = shifted_reciprocal();
  CHECK_THROWS_AS(derivative_via_cauchy(f, 0.0, 1, 1.9), std::domain_error);
  CHECK_THROWS_AS(derivative_via_cauchy(f, 0.0, 1, 0.5, 8), std::invalid_argument);
}

TEST_CASE("log eval of e^{-e^z} at z = 5") {
  const auto f = exp_neg_exp_handle();
  const auto lv = log_scale_eval(f, Complex(5.0, 0.0));
  CHECK(lv.log_magnitude == doctest::Approx(-std::exp(5.0)).epsilon(1e-14));
  CHECK(lv.phase == doctest::Approx(0.0));
}

TEST_CASE("log eval of the constant 1") {
  const auto f = handles::constant(1.0);
  const auto lv = log_scale_eval(f, Complex(17.0, 0.2));
  CHECK(lv.log_magnitude == doctest::Approx(0.0));
  CHECK(lv.phase == doctest::Approx(0.0));
}

TEST_CASE("log eval survives deep underflow at z = 8") {
  const auto f = exp_neg_exp_handle();
  // e^{-e^8} underflows double precision; the long double oracle still
  // represents it.
  const long double ld = std::exp(-(long double)std::exp(8.0));
  CHECK(ld > 0.0L);
  CHECK(std::exp(-std::exp(8.0)) == 0.0);

  const auto lv = log_scale_eval(f, Complex(8.0, 0.0));
  CHECK(lv.log_magnitude == doctest::Approx((double)std::log(ld)).epsilon(1e-12));
  CHECK(lv.log_magnitude == doctest::Approx(-std::exp(8.0)).epsilon(1e-12));
}

TEST_CASE("log eval of an exact zero yields the -inf sentinel") {
  const auto f = handles::constant(0.0);
  CHECK(std::isinf(log_scale_eval(f, Complex(1.0, 0.0)).log_magnitude));
}

TEST_CASE("log and linear evaluation agree for builtins on a sample grid") {
  const auto handles_list = {handles::exp_i_omega(2.0), handles::constant(Complex(1.5, -2.0))};
  for (const auto& f : handles_list) {
    for (double x : GridSpec(-3.0, 3.0, 13).xs()) {
      for (double y : {-0.4, 0.0, 0.4}) {
        const Complex z(x, y);
        const Complex direct = f.eval(z);
        if (std::abs(direct) < 1e-300 || std::abs(direct) > 1e300) continue;
        const Complex via_log = log_scale_eval(f, z).to_complex();
        CHECK(std::abs(via_log - direct) <= 1e-12 * std::abs(direct));
      }
    }
  }
}

TEST_CASE("builtin handles evaluate their closed forms") {
  const auto p = handles::polynomial({Complex(1.0), Complex(0.0), Complex(2.0)});
  CHECK(std::abs(p.eval(Complex(3.0, 0.0)) - Complex(19.0, 0.0)) < 1e-14);

  const auto t = handles::trig(2.0, {{handles::TrigTerm::Fn::Sin, 1.0, 0.1}});
  CHECK(std::abs(t.eval(Complex(0.5, 0.0)) - Complex(2.0 + 0.1 * std::sin(0.5), 0.0)) <
        1e-14);

  const auto e = handles::exp_i_omega(3.0);
  CHECK(std::abs(e.eval(Complex(0.0, 1.0)) - Complex(std::exp(-3.0), 0.0)) < 1e-14);
}

TEST_CASE("rational handle detects a pole inside the strip") {
  // 1/(1+z^2) has poles at +-i.
  CHECK_THROWS_AS(handles::rational({1.0}, {1.0, 0.0, 1.0}, 1.5), std::domain_error);
  CHECK_NOTHROW(handles::rational({1.0}, {1.0, 0.0, 1.0}, 0.9));
}

TEST_CASE("polynomial roots (Durand-Kerner) recover known roots") {
  // (z-1)(z-2i) = z^2 - (1+2i) z + 2i
  auto roots = handles::polynomial_roots({Complex(0.0, 2.0), -Complex(1.0, 2.0), 1.0});
  REQUIRE(roots.size() == 2);
  const bool found1 = std::abs(roots[0] - Complex(1.0, 0.0)) < 1e-9 ||
                      std::abs(roots[1] - Complex(1.0, 0.0)) < 1e-9;
  const bool found2 = std::abs(roots[0] - Complex(0.0, 2.0)) < 1e-9 ||
                      std::abs(roots[1] - Complex(0.0, 2.0)) < 1e-9;
  CHECK(found1);
  CHECK(found2);
}

TEST_CASE("jet built from a handle reproduces derivatives") {
  const auto f = handles::exp_i_omega(1.0);
  const Jet jet = jet_from_handle(f, 0.5, 8, 0.5);
  // f^(n)(x) = i^n e^{ix}
  const Complex expected = std::pow(Complex(0.0, 1.0), 3.0) * std::exp(Complex(0.0, 0.25));
  CHECK(std::abs(jet.deriv(3, 0.25) - expected) < 1e-11);
}
