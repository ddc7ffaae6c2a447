#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "cdsolve/extension.hpp"
#include "cdsolve/funcmodel.hpp"
#include "cdsolve/types.hpp"

namespace cdsolve {

/// Quadrature configuration for the disk split. The decay bounds require
/// rho * C0 < pi/2 (so cos(rho C0) > 0).
struct SplitParams {
  double rho = 0.5;
  double C0 = 1.0;
  std::size_t contour_nodes = 64;   // Gauss-Legendre points per semicircle
  std::size_t area_nodes_radial = 32;
  std::size_t area_nodes_angular = 32;

  void validate() const;
};

/// What the splitter needs from the function being split: values on the
/// closed disk and (unless analytic) dbar values on the half-disks.
struct SplitSource {
  std::function<Complex(Complex)> value;
  std::function<Complex(Complex)> dbar;  // unused when analytic
  bool analytic = true;
  double strip_halfwidth = std::numeric_limits<double>::infinity();

  static SplitSource from_handle(const AnalyticHandle& f);
  static SplitSource from_extension(const AlmostAnalyticExtension& ext);
};

/// The two halves f = f_plus + f_minus. f_plus is holomorphic off the left
/// arc and left half-disk and decays like e^{-cos(rho C0) e^{C0 Re z}} on
/// the right half-strip; f_minus mirrors it. Linear evaluation underflows
/// gracefully far out; the log evaluators stay exact there.
struct SplitPair {
  std::function<Complex(Complex)> f_plus;
  std::function<Complex(Complex)> f_minus;
  std::function<LogValue(Complex)> log_f_plus;
  std::function<LogValue(Complex)> log_f_minus;
  double D0_estimate = 0.0;
  double rho = 0.0;  // excluded half-disk radius; 0 for partition pairs
  double C0 = 1.0;
  double strip_halfwidth = std::numeric_limits<double>::infinity();
};

/// Weighted Cauchy-Pompeiu split on the disk of radius params.rho: each half
/// combines a Gauss-Legendre contour integral over its semicircular arc with
/// a polar-rule area integral over its half-disk (skipped for analytic
/// sources), against the kernel e^{e^{C0 zeta} + e^{-C0 zeta}}, then applies
/// the reciprocal kernel prefactor in log scale.
///
/// The sum f_plus + f_minus reproduces the source inside the disk and
/// vanishes outside it.
SplitPair split(const SplitSource& source, const SplitParams& params);

/// Shape of the partition-of-unity transition. With halfwidth 0 the profile
/// is the bare kernel switch sigma_plus = e^{-e^{C0 z}} / (e^{-e^{C0 z}} +
/// e^{-e^{-C0 z}}). A positive halfwidth spreads the transition over a
/// Kaiser-weighted comb of translates: the construction downstream is linear
/// in the split, so this equals averaging solutions over translated splits,
/// and it suppresses the resonant (homogeneous-solution) pickup of one-sided
/// series inversion by the window's transform at the resonance offsets.
struct PartitionProfile {
  double halfwidth = 0.0;
  double step = 0.5;
  double kaiser_beta = 18.0;
};

/// Exact split of an analytic function through the partition of unity
/// sigma_plus + sigma_minus = 1 built from the same double-exponential
/// kernel; the halves have the same decay as the disk split but their sum
/// reproduces f on the whole strip |Im z| < pi/(2 C0), not just on a disk.
SplitPair partition_split(const AnalyticHandle& f, double C0,
                          const PartitionProfile& profile = {});

/// max over the grid of |source(z) - f_plus(z) - f_minus(z)|.
double split_sum_check(const SplitPair& pair, const SplitSource& source,
                       const GridSpec& grid);

struct DecayFit {
  double fitted_inner_exponent = 0.0;
  double fitted_D0 = 0.0;
  bool bound_satisfied = false;
  bool degenerate = false;  // identically zero half (all log-magnitudes -inf)
};

/// Fits log(-log|f_plus| + const) against x on the given sample points
/// (sorted ascending, inside the right validity half-strip) to extract the
/// inner exponential rate, and checks the displayed decay bound with the
/// fitted D0. Uses the pair's own rho and C0.
DecayFit decay_check(const SplitPair& pair, const std::vector<double>& xs);

}  // namespace cdsolve
