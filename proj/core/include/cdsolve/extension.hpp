#pragma once

#include <functional>

#include "cdsolve/carleman.hpp"
#include "cdsolve/funcmodel.hpp"
#include "cdsolve/types.hpp"

namespace cdsolve {

/// A compactly supported C1 extension F of a jet, with an evaluable dbar F.
/// F(x+iy) = theta(z) * sum_{n<=N(|y|)} deriv(n,x) (iy)^n / n!, where N(|y|)
/// is tied to the argmin of the weight H_M(B|y|) and theta is a C1 radial
/// cutoff: 1 on |z| <= plateau_radius, 0 on |z| >= support_radius.
///
/// The certified estimate |dbar F(z)| <= A * H_M(B |Im z|) is sampled on the
/// plateau; A is an a-posteriori certificate, not a proof.
struct AlmostAnalyticExtension {
  std::function<Complex(Complex)> F;
  std::function<Complex(Complex)> dbar_F;
  double interval_halfwidth = 0.0;  // base interval [-r, r]
  double plateau_radius = 0.0;
  double support_radius = 0.0;
  double bound_A = 0.0;
  double bound_B = 1.0;
  /// True when the weight's argmin wanted more terms than the jet provides,
  /// so the truncation (and the achieved bound) is limited by jet.n_max.
  bool n_max_limited = false;
  /// Truncation order used at height |y| (piecewise constant in |y|).
  std::function<std::size_t(double)> truncation_index;
};

/// Builds the extension. Requires jet.n_max >= 1 and deriv evaluable on the
/// fattened interval [-(r+cutoff_margin), r+cutoff_margin].
AlmostAnalyticExtension build_extension(const Jet& jet, const CarlemanSequence& M,
                                        double B, double cutoff_margin);

struct DbarCheck {
  Complex analytic;
  Complex numeric;
  double discrepancy = 0.0;
  /// False when z sits within ~10h of a cutoff kink or a truncation switch
  /// height, where the centered difference cannot be trusted.
  bool reliable = true;
};

/// Centered-difference probe of dbar F at z with step h (default 1e-5).
DbarCheck dbar_check(const AlmostAnalyticExtension& ext, Complex z, double h = 1e-5);

}  // namespace cdsolve
