#include "cdsolve/extension.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace cdsolve {

namespace {

struct Bump {
  double r0 = 0.0;  // plateau edge
  double r1 = 0.0;  // support edge

  double value(double s) const {
    if (s <= r0) return 1.0;
    if (s >= r1) return 0.0;
    const double t = (s - r0) / (r1 - r0);
    return 1.0 - t * t * (3.0 - 2.0 * t);
  }
  double slope(double s) const {
    if (s <= r0 || s >= r1) return 0.0;
    const double t = (s - r0) / (r1 - r0);
    return -6.0 * t * (1.0 - t) / (r1 - r0);
  }
};

struct ExtensionState {
  Jet jet;
  CarlemanSequence M;
  double B;
  Bump bump;
  std::size_t cap;  // truncation never exceeds this (jet.n_max - 1)

  std::size_t trunc(double y) const {
    const double ay = std::abs(y);
    if (ay < 1e-300) return cap;  // y -> 0 limit: weight argmin hits the cap
    const WeightValue w = weight_eval(M, B * ay);
    return std::min(w.argmin_index, cap);
  }

  Complex taylor_sum(double x, double y, std::size_t N) const {
    Complex s = 0.0;
    Complex pw = 1.0;  // (iy)^n / n!
    const Complex iy(0.0, y);
    for (std::size_t n = 0; n <= N; ++n) {
      s += jet.deriv(n, x) * pw;
      pw *= iy / double(n + 1);
    }
    return s;
  }

  Complex F(Complex z) const {
    const double s = std::abs(z);
    if (s >= bump.r1) return 0.0;
    const std::size_t N = trunc(z.imag());
    return bump.value(s) * taylor_sum(z.real(), z.imag(), N);
  }

  Complex dbar(Complex z) const {
    const double s = std::abs(z);
    if (s >= bump.r1) return 0.0;
    const double x = z.real(), y = z.imag();
    const std::size_t N = trunc(y);

    // dbar of the truncated jet sum telescopes to the last-term remainder.
    Complex rem = 0.5 * jet.deriv(N + 1, x) *
                  std::pow(Complex(0.0, y), double(N)) *
                  std::exp(-std::lgamma(double(N) + 1.0));
    Complex out = bump.value(s) * rem;

    const double w1 = bump.slope(s);
    if (w1 != 0.0 && s > 0.0)
      out += taylor_sum(x, y, N) * w1 * z / (2.0 * s);
    return out;
  }
};

}  // namespace

AlmostAnalyticExtension build_extension(const Jet& jet, const CarlemanSequence& M,
                                        double B, double cutoff_margin) {
  if (!(B > 0.0)) throw std::domain_error("build_extension: B > 0 required");
  if (!(cutoff_margin > 0.0))
    throw std::domain_error("build_extension: cutoff_margin > 0 required");
  if (jet.n_max < 1)
    throw std::invalid_argument("build_extension: jet.n_max >= 1 required");

  auto st = std::make_shared<ExtensionState>(ExtensionState{
      jet, M, B,
      Bump{jet.halfwidth + 0.5 * cutoff_margin, jet.halfwidth + cutoff_margin},
      std::min(M.n_max(), jet.n_max - 1)});

  AlmostAnalyticExtension ext;
  ext.interval_halfwidth = jet.halfwidth;
  ext.plateau_radius = st->bump.r0;
  ext.support_radius = st->bump.r1;
  ext.bound_B = B;
  ext.F = [st](Complex z) { return st->F(z); };
  ext.dbar_F = [st](Complex z) { return st->dbar(z); };
  ext.truncation_index = [st](double y) { return st->trunc(y); };

  // A-posteriori certificate: sample sup |dbar F| / H_M(B|y|) over the
  // plateau, in log scale, excluding |y| < 1e-8 where both sides vanish.
  double log_A = -std::numeric_limits<double>::infinity();
  const std::size_t nx = 13, ny = 12;
  const double y_hi = 0.95 * st->bump.r0;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double y = y_hi * std::pow(10.0, -5.0 * double(ny - 1 - iy) / double(ny - 1));
    if (y < 1e-8) continue;
    const WeightValue hm = weight_eval(M, B * y);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = -jet.halfwidth +
                       2.0 * jet.halfwidth * double(ix) / double(nx - 1);
      if (std::hypot(x, y) >= st->bump.r0) continue;
      const double ad = std::abs(st->dbar(Complex(x, y)));
      if (ad == 0.0) continue;
      if (hm.argmin_index > st->cap) ext.n_max_limited = true;
      log_A = std::max(log_A, std::log(ad) - hm.log_value);
    }
  }
  ext.bound_A = std::isfinite(log_A) ? std::exp(log_A) : 0.0;
  return ext;
}

DbarCheck dbar_check(const AlmostAnalyticExtension& ext, Complex z, double h) {
  if (!(h > 0.0)) throw std::domain_error("dbar_check: h > 0 required");
  DbarCheck out;
  if (std::abs(z) > ext.support_radius + 2.0 * h) {
    out.analytic = out.numeric = 0.0;
    out.discrepancy = 0.0;
    return out;
  }

  const Complex dx = (ext.F(z + h) - ext.F(z - h)) / (2.0 * h);
  const Complex dy = (ext.F(z + Complex(0.0, h)) - ext.F(z - Complex(0.0, h))) / (2.0 * h);
  out.numeric = 0.5 * (dx + Complex(0.0, 1.0) * dy);
  out.analytic = ext.dbar_F(z);
  out.discrepancy = std::abs(out.analytic - out.numeric);

  const double s = std::abs(z);
  const double guard = 10.0 * h;
  if (std::abs(s - ext.plateau_radius) < guard ||
      std::abs(s - ext.support_radius) < guard)
    out.reliable = false;
  const double ay = std::abs(z.imag());
  if (ext.truncation_index(ay) != ext.truncation_index(ay + guard) ||
      (ay > guard && ext.truncation_index(ay) != ext.truncation_index(ay - guard)))
    out.reliable = false;
  return out;
}

}  // namespace cdsolve
