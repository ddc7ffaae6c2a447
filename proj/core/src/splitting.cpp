#include "cdsolve/splitting.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "cdsolve/quadrature.hpp"

namespace cdsolve {

namespace {

Complex kernel_exponent(double C0, Complex z) {
  // e^{C0 z} + e^{-C0 z}; bounded on the disk when rho C0 < pi/2.
  return std::exp(C0 * z) + std::exp(-C0 * z);
}

struct ArcData {
  std::vector<Complex> zeta;      // nodes on the arc
  std::vector<Complex> dzeta_w;   // zeta'(t) * GL weight at each node
  std::vector<Complex> g;         // w(zeta) * F(zeta) at each node
  std::vector<Complex> seg;       // segment endpoints for the exact log term
};

struct AreaData {
  std::vector<Complex> zeta;
  std::vector<Complex> density;   // w * dbarF * s * (radial w) * (angular w)
};

struct DiskSplitState {
  SplitParams p;
  SplitSource src;
  ArcData arc[2];    // 0: plus (left semicircle), 1: minus (right semicircle)
  AreaData area[2];  // matching half-disks
  double max_abs_g = 0.0;

  // Arc angle ranges, oriented as parts of the CCW circle.
  static constexpr double kT0[2] = {0.5 * kPi, -0.5 * kPi};
  static constexpr double kT1[2] = {1.5 * kPi, 0.5 * kPi};

  Complex weighted_value(Complex z) const {
    return std::exp(kernel_exponent(p.C0, z)) * src.value(z);
  }

  void build() {
    const std::size_t kSegs = 32;
    for (int side = 0; side < 2; ++side) {
      const auto rule = gauss_legendre(p.contour_nodes, kT0[side], kT1[side]);
      auto& a = arc[side];
      a.zeta.resize(rule.nodes.size());
      a.dzeta_w.resize(rule.nodes.size());
      a.g.resize(rule.nodes.size());
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double t = rule.nodes[k];
        const Complex e{std::cos(t), std::sin(t)};
        a.zeta[k] = p.rho * e;
        a.dzeta_w[k] = Complex(0.0, p.rho) * e * rule.weights[k];
        a.g[k] = weighted_value(a.zeta[k]);
        max_abs_g = std::max(max_abs_g, std::abs(a.g[k]));
      }
      a.seg.resize(kSegs + 1);
      for (std::size_t j = 0; j <= kSegs; ++j) {
        const double t = kT0[side] + (kT1[side] - kT0[side]) * double(j) / double(kSegs);
        a.seg[j] = p.rho * Complex(std::cos(t), std::sin(t));
      }

      if (!src.analytic) {
        const auto rad = gauss_legendre(p.area_nodes_radial, 0.0, p.rho);
        const auto ang = gauss_legendre(p.area_nodes_angular, kT0[side], kT1[side]);
        auto& ar = area[side];
        ar.zeta.reserve(rad.nodes.size() * ang.nodes.size());
        ar.density.reserve(ar.zeta.capacity());
        for (std::size_t ir = 0; ir < rad.nodes.size(); ++ir) {
          const double s = rad.nodes[ir];
          for (std::size_t it = 0; it < ang.nodes.size(); ++it) {
            const double t = ang.nodes[it];
            const Complex zeta = s * Complex(std::cos(t), std::sin(t));
            ar.zeta.push_back(zeta);
            ar.density.push_back(std::exp(kernel_exponent(p.C0, zeta)) *
                                 src.dbar(zeta) * s * rad.weights[ir] * ang.weights[it]);
          }
        }
      }
    }
  }

  // integral over the arc of dzeta/(zeta - z), exact up to the principal-log
  // telescoping over short segments.
  Complex arc_log_term(int side, Complex z) const {
    Complex total = 0.0;
    const auto& seg = arc[side].seg;
    for (std::size_t j = 0; j + 1 < seg.size(); ++j)
      total += std::log((seg[j + 1] - z) / (seg[j] - z));
    return total;
  }

  // The bracket I(z) = (1/2 pi i) contour - (1/pi) area for one side.
  Complex bracket(int side, Complex z) const {
    const auto& a = arc[side];
    Complex contour = 0.0;
    const bool subtract =
        std::abs(z) <= 1.25 * p.rho &&
        (!src.analytic || std::abs(z.imag()) < src.strip_halfwidth);
    if (subtract) {
      // Remove the pole: integrate (G(zeta)-G(z))/(zeta-z) (entire where G
      // is) and add G(z) * the exact log of the Cauchy kernel over the arc.
      const Complex gz = weighted_value(z);
      for (std::size_t k = 0; k < a.zeta.size(); ++k)
        contour += (a.g[k] - gz) / (a.zeta[k] - z) * a.dzeta_w[k];
      contour += gz * arc_log_term(side, z);
    } else {
      for (std::size_t k = 0; k < a.zeta.size(); ++k)
        contour += a.g[k] / (a.zeta[k] - z) * a.dzeta_w[k];
    }
    Complex out = contour / Complex(0.0, 2.0 * kPi);

    if (!src.analytic) {
      const auto& ar = area[side];
      Complex sum = 0.0;
      for (std::size_t k = 0; k < ar.zeta.size(); ++k)
        sum += ar.density[k] / (ar.zeta[k] - z);
      out -= sum / kPi;
    }
    return out;
  }

  void check_domain(int side, Complex z) const {
    if (z.imag() == 0.0) return;  // the halves are defined on all of R
    const double re = (side == 0) ? z.real() : -z.real();
    if (re < 0.0 && std::abs(z) < p.rho * (1.0 - 1e-12))
      throw std::domain_error(
          side == 0 ? "split: f_plus undefined strictly inside the left half-disk"
                    : "split: f_minus undefined strictly inside the right half-disk");
  }

  LogValue eval_log(int side, Complex z) const {
    check_domain(side, z);
    // Real points riding on the circle hit the arc endpoints; realize the
    // boundary value by nudging off-axis and averaging, with a Richardson
    // fallback if the two nudges disagree.
    if (z.imag() == 0.0 &&
        std::abs(std::abs(z.real()) - p.rho) <= 10.0 * 2.220446049250313e-16 *
                                                    std::max(1.0, p.rho)) {
      auto avg_at = [&](double eps) {
        const Complex up = bracket(side, z + Complex(0.0, eps));
        const Complex dn = bracket(side, z - Complex(0.0, eps));
        return std::make_pair(0.5 * (up + dn), std::abs(up - dn));
      };
      auto [v1, d1] = avg_at(1e-12);
      Complex value = v1;
      if (d1 > 1e-9) {
        auto [v2, d2] = avg_at(2e-12);
        value = 2.0 * v1 - v2;
      }
      return combine(z, value);
    }
    return combine(z, bracket(side, z));
  }

  LogValue combine(Complex z, Complex bracket_value) const {
    if (bracket_value == Complex(0.0, 0.0)) return {};
    const Complex pref = -kernel_exponent(p.C0, z);  // log of the prefactor
    return LogValue{pref.real() + std::log(std::abs(bracket_value)),
                    wrap_phase(pref.imag() + std::arg(bracket_value))};
  }
};

constexpr double DiskSplitState::kT0[2];
constexpr double DiskSplitState::kT1[2];

double fit_D0(const SplitPair& pair, const std::vector<double>& xs_right) {
  // log D0 = sup over samples of log|f(x)| + cos(rho C0) e^{C0 |x|}, taken
  // over both halves on their respective decay sides.
  const double c = std::cos(pair.rho * pair.C0);
  double log_d0 = -std::numeric_limits<double>::infinity();
  for (double x : xs_right) {
    const LogValue lp = pair.log_f_plus(Complex(x, 0.0));
    const LogValue lm = pair.log_f_minus(Complex(-x, 0.0));
    const double bound = c * std::exp(pair.C0 * x);
    if (std::isfinite(lp.log_magnitude))
      log_d0 = std::max(log_d0, lp.log_magnitude + bound);
    if (std::isfinite(lm.log_magnitude))
      log_d0 = std::max(log_d0, lm.log_magnitude + bound);
  }
  return std::isfinite(log_d0) ? std::exp(std::min(log_d0, 700.0)) : 0.0;
}

std::vector<double> default_fit_xs(double rho) {
  std::vector<double> xs;
  for (int i = 0; i < 8; ++i) xs.push_back(rho + 0.5 + 0.4 * double(i));
  return xs;
}

}  // namespace

void SplitParams::validate() const {
  if (!(rho > 0.0) || !(C0 > 0.0) || !(rho * C0 < 0.5 * kPi))
    throw std::invalid_argument("SplitParams: need rho > 0, C0 > 0, rho*C0 < pi/2");
  if (contour_nodes < 16)
    throw std::invalid_argument("SplitParams: contour_nodes >= 16 required");
  if (area_nodes_radial < 4 || area_nodes_angular < 4)
    throw std::invalid_argument("SplitParams: area nodes >= 4 required");
}

SplitSource SplitSource::from_handle(const AnalyticHandle& f) {
  SplitSource s;
  s.value = f.eval;
  s.analytic = true;
  s.strip_halfwidth = f.strip_halfwidth;
  return s;
}

SplitSource SplitSource::from_extension(const AlmostAnalyticExtension& ext) {
  SplitSource s;
  s.value = ext.F;
  s.dbar = ext.dbar_F;
  s.analytic = false;
  return s;
}

SplitPair split(const SplitSource& source, const SplitParams& params) {
  params.validate();
  if (source.analytic && source.strip_halfwidth <= params.rho)
    throw std::domain_error(
        "split: analytic source must be holomorphic on the closed disk "
        "(strip_halfwidth > rho)");

  auto st = std::make_shared<DiskSplitState>();
  st->p = params;
  st->src = source;
  st->build();

  SplitPair pair;
  pair.rho = params.rho;
  pair.C0 = params.C0;
  pair.strip_halfwidth = source.analytic ? source.strip_halfwidth
                                         : std::numeric_limits<double>::infinity();
  pair.log_f_plus = [st](Complex z) { return st->eval_log(0, z); };
  pair.log_f_minus = [st](Complex z) { return st->eval_log(1, z); };
  pair.f_plus = [st](Complex z) { return st->eval_log(0, z).to_complex(); };
  pair.f_minus = [st](Complex z) { return st->eval_log(1, z).to_complex(); };
  pair.D0_estimate = fit_D0(pair, default_fit_xs(params.rho));
  return pair;
}

namespace {

double bessel_i0(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 120; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

SplitPair partition_split(const AnalyticHandle& f, double C0,
                          const PartitionProfile& profile) {
  if (!(C0 > 0.0)) throw std::invalid_argument("partition_split: C0 > 0 required");
  if (profile.halfwidth < 0.0 || profile.step <= 0.0)
    throw std::invalid_argument("partition_split: bad profile");
  const double strip = std::min(f.strip_halfwidth, 0.5 * kPi / C0);

  // Translate grid and Kaiser weights; {0} with weight 1 for the bare switch.
  std::vector<double> taus;
  std::vector<double> log_w;
  {
    std::vector<double> ws;
    double wsum = 0.0;
    if (profile.halfwidth == 0.0) {
      taus.push_back(0.0);
      ws.push_back(1.0);
      wsum = 1.0;
    } else {
      for (double t = -profile.halfwidth; t <= profile.halfwidth + 1e-12;
           t += profile.step) {
        const double u = t / profile.halfwidth;
        taus.push_back(t);
        ws.push_back(bessel_i0(profile.kaiser_beta *
                               std::sqrt(std::max(0.0, 1.0 - u * u))));
        wsum += ws.back();
      }
    }
    for (double w : ws) log_w.push_back(std::log(w / wsum));
  }

  // sigma_plus = sum_k w_k e^{-e^{C0(z-tau_k)}} / d_k with d_k the two-sided
  // kernel sum at z - tau_k; the translates' weights sum to 1, so
  // sigma_plus + sigma_minus = 1 exactly. d has no zeros for
  // |Im z| < pi/(2 C0) and each half decays like
  // e^{-cos(C0 Im z) e^{C0 |Re z|}} beyond the transition region.
  // Evaluated in log scale throughout.
  AnalyticHandle fn = f;
  auto log_sigma = [C0, strip, taus, log_w](Complex z, int sign) -> Complex {
    if (std::abs(z.imag()) >= strip)
      throw std::domain_error("partition_split: z outside the validity strip");
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<Complex> terms(taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const Complex zt = z - taus[k];
      const Complex ea = -std::exp(C0 * zt);   // log of e^{-e^{C0 zt}}
      const Complex eb = -std::exp(-C0 * zt);  // log of e^{-e^{-C0 zt}}
      const Complex lo = (ea.real() >= eb.real()) ? ea : eb;
      const Complex hi = (ea.real() >= eb.real()) ? eb : ea;
      const Complex log_d = lo + std::log(1.0 + std::exp(hi - lo));
      terms[k] = log_w[k] + (sign > 0 ? ea : eb) - log_d;
      mx = std::max(mx, terms[k].real());
    }
    if (!std::isfinite(mx)) return Complex(mx, 0.0);
    Complex acc = 0.0;
    for (const Complex& t : terms) acc += std::exp(t - mx);
    return mx + std::log(acc);
  };

  auto make_log = [fn, log_sigma](int sign) {
    return [fn, log_sigma, sign](Complex z) -> LogValue {
      const LogValue lf = log_scale_eval(fn, z);
      if (!std::isfinite(lf.log_magnitude)) return {};
      const Complex ls = log_sigma(z, sign);
      return LogValue{lf.log_magnitude + ls.real(),
                      wrap_phase(lf.phase + ls.imag())};
    };
  };

  SplitPair pair;
  pair.rho = 0.0;
  pair.C0 = C0;
  pair.strip_halfwidth = strip;
  pair.log_f_plus = make_log(+1);
  pair.log_f_minus = make_log(-1);
  pair.f_plus = [fn, log_sigma](Complex z) {
    return fn.eval(z) * std::exp(log_sigma(z, +1));
  };
  pair.f_minus = [fn, log_sigma](Complex z) {
    return fn.eval(z) * std::exp(log_sigma(z, -1));
  };
  pair.D0_estimate = fit_D0(pair, default_fit_xs(0.5));
  return pair;
}

double split_sum_check(const SplitPair& pair, const SplitSource& source,
                       const GridSpec& grid) {
  double worst = 0.0;
  for (Complex z : grid.zs()) {
    const Complex err = source.value(z) - pair.f_plus(z) - pair.f_minus(z);
    worst = std::max(worst, std::abs(err));
  }
  return worst;
}

DecayFit decay_check(const SplitPair& pair, const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("decay_check: xs must be nonempty");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1]))
      throw std::invalid_argument("decay_check: xs must be sorted ascending");

  DecayFit fit;
  std::vector<double> lv(xs.size());
  bool any_finite = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lv[i] = pair.log_f_plus(Complex(xs[i], 0.0)).log_magnitude;
    any_finite = any_finite || std::isfinite(lv[i]);
  }
  if (!any_finite) {
    fit.degenerate = true;
    fit.bound_satisfied = true;
    return fit;
  }

  const double c = std::cos(pair.rho * pair.C0);
  double log_d0 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::isfinite(lv[i]))
      log_d0 = std::max(log_d0, lv[i] + c * std::exp(pair.C0 * xs[i]));
  fit.fitted_D0 = std::exp(std::min(log_d0, 700.0));

  // Regress log(-log|f_plus|) on x; the inner exponential rate is the
  // slope. The fitted D0 stays out of the regression: it carries the
  // strip-uniform constant cos(rho C0) while the on-axis decay runs at
  // cos(0), and mixing the two biases the small-x samples.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = -lv[i];
    if (!std::isfinite(lv[i]) || !(u > 0.0)) continue;
    const double v = std::log(u);
    sx += xs[i];
    sy += v;
    sxx += xs[i] * xs[i];
    sxy += xs[i] * v;
    ++n;
  }
  if (n >= 2) {
    const double denom = double(n) * sxx - sx * sx;
    fit.fitted_inner_exponent = (double(n) * sxy - sx * sy) / denom;
  }

  fit.bound_satisfied = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(lv[i])) continue;
    if (lv[i] > log_d0 - c * std::exp(pair.C0 * xs[i]) + 1e-9)
      fit.bound_satisfied = false;
  }
  return fit;
}

}  // namespace cdsolve
