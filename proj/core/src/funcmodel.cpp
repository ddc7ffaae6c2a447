#include "cdsolve/funcmodel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cdsolve {

LogValue log_scale_eval(const AnalyticHandle& f, Complex z) {
  if (std::abs(z.imag()) >= f.strip_halfwidth)
    throw std::domain_error("log_scale_eval: z outside the handle's strip");
  if (f.log_eval) {
    LogValue v = f.log_eval(z);
    v.phase = wrap_phase(v.phase);
    return v;
  }
  return LogValue::from_complex(f.eval(z));
}

Complex derivative_via_cauchy(const AnalyticHandle& f, double x, std::size_t n,
                              double radius, std::size_t nodes) {
  if (!(radius > 0.0) || radius >= f.strip_halfwidth)
    throw std::domain_error("derivative_via_cauchy: need 0 < radius < strip_halfwidth");
  if (nodes < 16)
    throw std::invalid_argument("derivative_via_cauchy: nodes >= 16 required");

  // (n!/2 pi i) * integral over |zeta-x| = r reduces to the n-th Fourier
  // coefficient of f on the circle, scaled by n!/r^n.
  Complex acc = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = 2.0 * kPi * double(k) / double(nodes);
    const Complex e{std::cos(t), std::sin(t)};
    acc += f.eval(Complex(x, 0.0) + radius * e) * std::conj(std::pow(e, double(n)));
  }
  const double scale = std::exp(std::lgamma(double(n) + 1.0) - double(n) * std::log(radius));
  return acc * (scale / double(nodes));
}

Jet jet_from_handle(const AnalyticHandle& f, double halfwidth, std::size_t n_max,
                    double radius, std::size_t nodes) {
  if (radius <= 0.0) {
    radius = std::isfinite(f.strip_halfwidth) ? 0.5 * f.strip_halfwidth : 1.0;
  }
  struct Cache {
    std::map<std::pair<std::size_t, long long>, Complex> values;
    std::mutex mu;
  };
  auto cache = std::make_shared<Cache>();
  AnalyticHandle fn = f;
  const double r = radius;
  const std::size_t nn = nodes;

  Jet jet;
  jet.halfwidth = halfwidth;
  jet.n_max = n_max;
  jet.deriv = [fn, r, nn, cache](std::size_t n, double x) -> Complex {
    const long long qx = llround(x / 1e-12);
    const auto key = std::make_pair(n, qx);
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      auto it = cache->values.find(key);
      if (it != cache->values.end()) return it->second;
    }
    const Complex v = derivative_via_cauchy(fn, x, n, r, nn);
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->values.emplace(key, v);
    return v;
  };
  return jet;
}

namespace handles {

AnalyticHandle constant(Complex c) {
  AnalyticHandle h;
  h.eval = [c](Complex) { return c; };
  h.log_eval = [c](Complex) { return LogValue::from_complex(c); };
  return h;
}

AnalyticHandle polynomial(std::vector<Complex> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  AnalyticHandle h;
  h.eval = [coeffs](Complex z) {
    Complex v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) v = v * z + coeffs[k];
    return v;
  };
  return h;
}

AnalyticHandle exp_i_omega(double omega) {
  AnalyticHandle h;
  h.eval = [omega](Complex z) { return std::exp(Complex(0.0, omega) * z); };
  h.log_eval = [omega](Complex z) {
    return LogValue{-omega * z.imag(), wrap_phase(omega * z.real())};
  };
  return h;
}

AnalyticHandle trig(Complex offset, std::vector<TrigTerm> terms) {
  AnalyticHandle h;
  h.eval = [offset, terms](Complex z) {
    Complex v = offset;
    for (const auto& t : terms) {
      const Complex arg = t.omega * z;
      v += t.amplitude * (t.fn == TrigTerm::Fn::Cos ? std::cos(arg) : std::sin(arg));
    }
    return v;
  };
  return h;
}

std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs) {
  while (coeffs.size() > 1 && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
  const std::size_t deg = coeffs.size() - 1;
  if (deg == 0) return {};
  for (auto& c : coeffs) c /= coeffs.back();

  // Durand-Kerner from a slightly irrational starting spiral.
  std::vector<Complex> r(deg);
  const Complex seed{0.4, 0.9};
  r[0] = seed;
  for (std::size_t k = 1; k < deg; ++k) r[k] = r[k - 1] * seed;

  auto eval = [&coeffs](Complex z) {
    Complex v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) v = v * z + coeffs[k];
    return v;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double shift = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) denom *= (r[i] - r[j]);
      const Complex d = eval(r[i]) / denom;
      r[i] -= d;
      shift = std::max(shift, std::abs(d));
    }
    if (shift < 1e-13) break;
  }
  return r;
}

AnalyticHandle rational(std::vector<Complex> num, std::vector<Complex> den,
                        double strip_halfwidth) {
  if (den.empty()) throw std::invalid_argument("rational: empty denominator");
  for (const Complex& root : polynomial_roots(den)) {
    if (std::abs(root.imag()) < strip_halfwidth)
      throw std::domain_error("rational: denominator root at Im = " +
                              std::to_string(root.imag()) +
                              " lies inside the requested strip");
  }
  AnalyticHandle h;
  auto p = polynomial(std::move(num));
  auto q = polynomial(std::move(den));
  h.strip_halfwidth = strip_halfwidth;
  h.eval = [p, q](Complex z) { return p.eval(z) / q.eval(z); };
  return h;
}

}  // namespace handles

}  // namespace cdsolve
