#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "cdsolve/types.hpp"

namespace cdsolve {

/// An evaluable holomorphic function on the strip |Im z| < strip_halfwidth.
/// log_eval, when present, gives log|f| and arg f without going through a
/// possibly over/underflowing linear value; builtins with double-exponential
/// behavior supply it analytically.
struct AnalyticHandle {
  std::function<Complex(Complex)> eval;
  double strip_halfwidth = std::numeric_limits<double>::infinity();
  std::function<LogValue(Complex)> log_eval;  // optional

  Complex operator()(Complex z) const { return eval(z); }
};

/// log|f(z)| and arg f(z); uses the handle's analytic log path when
/// available, otherwise the logarithm of the linear value. An exact zero
/// (or an underflowed linear value) comes back with log_magnitude = -inf.
LogValue log_scale_eval(const AnalyticHandle& f, Complex z);

/// Derivative data of a smooth function on [-halfwidth, halfwidth]:
/// deriv(n, x) = f^(n)(x) for n <= n_max.
struct Jet {
  double halfwidth = 1.0;
  std::size_t n_max = 0;
  std::function<Complex(std::size_t, double)> deriv;
};

/// (n!/2 pi i) * closed circle integral of f(zeta)/(zeta-x)^{n+1} by the
/// trapezoidal rule (spectrally accurate for analytic integrands).
/// Requires radius < f.strip_halfwidth and nodes >= 16.
Complex derivative_via_cauchy(const AnalyticHandle& f, double x, std::size_t n,
                              double radius, std::size_t nodes = 64);

/// Builds a Jet from an analytic handle, with derivatives computed on demand
/// via circle quadrature and memoized. Defaults: radius = half the strip
/// width (capped for infinite strips), 64 nodes.
Jet jet_from_handle(const AnalyticHandle& f, double halfwidth, std::size_t n_max,
                    double radius = 0.0, std::size_t nodes = 64);

// Builtin handle constructors (the closed set exposed to config).
namespace handles {

AnalyticHandle constant(Complex c);
/// coeffs[k] multiplies z^k.
AnalyticHandle polynomial(std::vector<Complex> coeffs);
/// exp(i * omega * z), with an exact log path.
AnalyticHandle exp_i_omega(double omega);

struct TrigTerm {
  enum class Fn { Cos, Sin } fn = Fn::Cos;
  double omega = 1.0;
  Complex amplitude = 1.0;
};
/// offset + sum of amplitude * cos/sin(omega z).
AnalyticHandle trig(Complex offset, std::vector<TrigTerm> terms);

/// num(z)/den(z). Throws std::domain_error at construction if a root of the
/// denominator lies within the requested strip (pole-in-strip detection).
AnalyticHandle rational(std::vector<Complex> num, std::vector<Complex> den,
                        double strip_halfwidth);

/// Roots of a polynomial by Durand-Kerner iteration (used for the pole
/// check; exposed for tests).
std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs);

}  // namespace handles

}  // namespace cdsolve
