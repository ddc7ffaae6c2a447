#pragma once

#include <cstddef>
#include <vector>

namespace cdsolve {

/// Gauss-Legendre nodes and weights on [a, b].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes the n-point Gauss-Legendre rule on [a, b] by Newton iteration
/// on the Legendre recurrence. n >= 1.
GaussLegendreRule gauss_legendre(std::size_t n, double a, double b);

}  // namespace cdsolve
