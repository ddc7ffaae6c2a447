#include "cdsolve/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "cdsolve/types.hpp"

namespace cdsolve {

GaussLegendreRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  const double xm = 0.5 * (b + a);
  const double xl = 0.5 * (b - a);
  const std::size_t m = (n + 1) / 2;
  const double eps = 1e-15;

  for (std::size_t i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th root of P_n.
    double z = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * double(j) + 1.0) * z * p2 - double(j) * p3) / double(j + 1);
      }
      pp = double(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    rule.nodes[i] = xm - xl * z;
    rule.nodes[n - 1 - i] = xm + xl * z;
    rule.weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

}  // namespace cdsolve
