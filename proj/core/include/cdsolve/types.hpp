#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdsolve {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Magnitude/phase of a complex value in log scale, for quantities that
/// over- or underflow doubles (anything bounded by e^{+-c e^{C|Re z|}}).
/// log_magnitude == -inf encodes an exact zero (or an underflowed value).
struct LogValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  double phase = 0.0;  // in (-pi, pi]

  Complex to_complex() const {
    const double m = std::exp(log_magnitude);  // underflows gracefully to 0
    return {m * std::cos(phase), m * std::sin(phase)};
  }
  static LogValue from_complex(Complex v) {
    if (v == Complex(0.0, 0.0)) return {};
    return {std::log(std::abs(v)), std::arg(v)};
  }
};

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double a) {
  double y = std::remainder(a, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

/// Uniform evaluation grid on [x_min, x_max], optionally lifted off the
/// real axis by a constant imaginary offset.
struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t count = 33;
  double imag_offset = 0.0;

  GridSpec() = default;
  GridSpec(double a, double b, std::size_t n, double imag = 0.0)
      : x_min(a), x_max(b), count(n), imag_offset(imag) {
    if (!(x_min < x_max) || count < 2)
      throw std::invalid_argument("GridSpec: need x_min < x_max and count >= 2");
  }

  std::vector<double> xs() const {
    std::vector<double> v(count);
    const double h = (x_max - x_min) / double(count - 1);
    for (std::size_t i = 0; i < count; ++i) v[i] = x_min + h * double(i);
    v.back() = x_max;
    return v;
  }
  std::vector<Complex> zs() const {
    std::vector<Complex> v;
    v.reserve(count);
    for (double x : xs()) v.emplace_back(x, imag_offset);
    return v;
  }
};

/// Thrown when a series fails to reach the requested tolerance before the
/// level cap; carries the per-term sup trace for diagnostics.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> sup_g,
                   std::vector<double> sup_h)
      : std::runtime_error(msg), sup_g(std::move(sup_g)), sup_h(std::move(sup_h)) {}
  std::vector<double> sup_g;
  std::vector<double> sup_h;
};

/// Thrown when the recurrence memo cache exceeds its configured budget.
class CacheBudgetError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cdsolve
