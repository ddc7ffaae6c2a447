#include "cdsolve/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace cdsolve {

namespace {

double logsumexp(const std::vector<double>& logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logs) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

Complex DifferenceProblem::chi_value(double x) const {
  if (chi_is_analytic()) return std::get<AnalyticHandle>(chi).eval(Complex(x, 0.0));
  return std::get<Jet>(chi).deriv(0, x);
}

DifferenceProblem make_difference_problem(std::vector<double> alphas,
                                          std::vector<AnalyticHandle> coeffs,
                                          std::variant<AnalyticHandle, Jet> chi,
                                          double delta, double C) {
  if (alphas.size() < 3)
    throw std::invalid_argument(
        "difference problem: q >= 3 required (q = 1, 2 were settled separately "
        "and are out of scope)");
  if (alphas.size() != coeffs.size())
    throw std::invalid_argument("difference problem: |alphas| must equal |coeffs|");
  for (std::size_t j = 0; j + 1 < alphas.size(); ++j)
    if (!(alphas[j] < alphas[j + 1]))
      throw std::invalid_argument("difference problem: alphas must be strictly increasing");
  if (!(delta > 0.0) || !(C > 0.0))
    throw std::invalid_argument("difference problem: delta > 0 and C > 0 required");
  for (const auto& a : coeffs)
    if (a.strip_halfwidth < delta)
      throw std::invalid_argument(
          "difference problem: every coefficient must be holomorphic on R_delta");

  DifferenceProblem p;
  p.alphas = std::move(alphas);
  p.coeffs = std::move(coeffs);
  p.chi = std::move(chi);
  p.delta = delta;
  p.C = C;
  return p;
}

ValidationReport validate_problem(const DifferenceProblem& p, const GridSpec& grid) {
  ValidationReport r;
  r.structure_ok = p.q() >= 3;
  const std::size_t q = p.q();
  const AnalyticHandle& a1 = p.coeffs.front();
  const AnalyticHandle& aq = p.coeffs.back();

  const std::vector<double> rows = {grid.imag_offset, 0.45 * p.delta, -0.45 * p.delta,
                                    0.9 * p.delta, -0.9 * p.delta};

  auto sample_sup = [&](double x_lo, double x_hi) {
    double min_a1 = std::numeric_limits<double>::infinity();
    double min_aq = min_a1;
    double sup_log = -std::numeric_limits<double>::infinity();
    const GridSpec g(x_lo, x_hi, grid.count);
    for (double x : g.xs()) {
      for (double y : rows) {
        const Complex z(x, y);
        std::vector<double> logs;
        logs.reserve(2 * q);
        const double la1 = log_scale_eval(a1, z).log_magnitude;
        const double laq = log_scale_eval(aq, z).log_magnitude;
        min_a1 = std::min(min_a1, std::exp(la1));
        min_aq = std::min(min_aq, std::exp(laq));
        for (std::size_t j = 1; j < q; ++j)
          logs.push_back(log_scale_eval(p.coeffs[j], z).log_magnitude - la1);
        for (std::size_t j = 0; j + 1 < q; ++j)
          logs.push_back(log_scale_eval(p.coeffs[j], z).log_magnitude - laq);
        logs.push_back(-la1);
        logs.push_back(-laq);
        sup_log = std::max(sup_log, logsumexp(logs) - std::exp(p.C * std::abs(x)));
      }
    }
    return std::make_tuple(min_a1, min_aq, sup_log);
  };

  auto [m1, mq, sup] = sample_sup(grid.x_min, grid.x_max);
  auto [m1w, mqw, supw] = sample_sup(2.0 * grid.x_min, 2.0 * grid.x_max);
  r.min_a1 = std::min(m1, m1w);
  r.min_aq = std::min(mq, mqw);
  r.growth_sup_log = sup;
  r.growth_sup_log_wide = supw;
  r.nonvanishing_ok = r.min_a1 > 1e-9 && r.min_aq > 1e-9;
  r.growth_ok = supw <= sup + 1e-9 * std::max(1.0, std::abs(sup)) + 1e-9;

  if (!r.nonvanishing_ok) {
    std::ostringstream os;
    os << "a_1 or a_q nearly vanishes on the sampled strip (min |a_1| = " << r.min_a1
       << ", min |a_q| = " << r.min_aq << ")";
    r.notes.push_back(os.str());
  }
  if (!r.growth_ok)
    r.notes.push_back(
        "growth-condition expression increases with grid width; the sampled sup "
        "is not stable (advisory)");
  return r;
}

DerivedCoefficients derive_coefficients(const DifferenceProblem& p,
                                        std::optional<double> C1_opt,
                                        std::optional<double> delta0_opt) {
  DerivedCoefficients dc;
  const std::size_t q = p.q();
  dc.C1 = C1_opt.value_or(p.C + 1.0);
  if (!(dc.C1 > p.C))
    throw std::invalid_argument("derive_coefficients: C1 > C required");
  const double d0_max = std::min(p.delta, 0.5 * kPi / dc.C1);
  dc.delta0 = delta0_opt.value_or(0.5 * d0_max);
  if (!(dc.delta0 > 0.0) || !(dc.delta0 < d0_max))
    throw std::invalid_argument(
        "derive_coefficients: delta0 must lie in (0, min(delta, pi/(2 C1)))");

  dc.alpha1 = p.alphas.front();
  dc.alphaq = p.alphas.back();
  dc.a1 = p.coeffs.front();
  dc.aq = p.coeffs.back();
  for (std::size_t j = 1; j < q; ++j) dc.betas.push_back(p.alphas[j] - p.alphas[0]);
  for (std::size_t j = 0; j + 1 < q; ++j)
    dc.gammas.push_back(p.alphas[q - 1] - p.alphas[j]);

  for (std::size_t j = 1; j < q; ++j) {
    AnalyticHandle aj = p.coeffs[j], a1 = dc.a1;
    AnalyticHandle h;
    h.strip_halfwidth = p.delta;
    h.eval = [aj, a1](Complex z) { return -aj.eval(z) / a1.eval(z); };
    dc.b.push_back(std::move(h));
  }
  for (std::size_t j = 0; j + 1 < q; ++j) {
    AnalyticHandle aj = p.coeffs[j], aq = dc.aq;
    AnalyticHandle h;
    h.strip_halfwidth = p.delta;
    h.eval = [aj, aq](Complex z) { return -aj.eval(z) / aq.eval(z); };
    dc.c.push_back(std::move(h));
  }
  return dc;
}

RhsSplit split_rhs(const DifferenceProblem& p, const DerivedCoefficients& dc,
                   const RhsSplitOptions& opts) {
  SplitStrategy strategy = opts.strategy;
  if (strategy == SplitStrategy::Auto)
    strategy = p.chi_is_analytic() ? SplitStrategy::Partition : SplitStrategy::Disk;

  RhsSplit out;
  out.used = strategy;
  if (strategy == SplitStrategy::Partition) {
    if (!p.chi_is_analytic())
      throw std::invalid_argument("split_rhs: the partition split needs analytic chi");
    PartitionProfile profile;
    if (opts.suppress_resonances) {
      if (!(opts.resonance_gap > 0.0) || !(opts.window_beta > 0.0))
        throw std::invalid_argument("split_rhs: bad resonance window parameters");
      profile.halfwidth = std::sqrt(opts.window_beta * opts.window_beta + kPi * kPi) /
                          opts.resonance_gap;
      profile.step = opts.window_step;
      profile.kaiser_beta = opts.window_beta;
    }
    out.pair = partition_split(std::get<AnalyticHandle>(p.chi), dc.C1, profile);
    out.sum_identity_halfwidth = std::numeric_limits<double>::infinity();
    return out;
  }

  SplitParams params;
  params.rho = dc.delta0;
  params.C0 = dc.C1;
  params.contour_nodes = opts.contour_nodes;
  params.area_nodes_radial = opts.area_nodes_radial;
  params.area_nodes_angular = opts.area_nodes_angular;

  if (p.chi_is_analytic()) {
    out.pair = split(SplitSource::from_handle(std::get<AnalyticHandle>(p.chi)), params);
  } else {
    const Jet& jet = std::get<Jet>(p.chi);
    if (jet.halfwidth < dc.delta0)
      throw std::invalid_argument(
          "split_rhs: jet base interval must contain [-delta0, delta0]");
    const CarlemanSequence M =
        opts.carleman ? *opts.carleman : CarlemanSequence::factorial_squared(40);
    const auto ext = build_extension(jet, M, opts.ext_B, opts.ext_margin);
    out.pair = split(SplitSource::from_extension(ext), params);
  }
  out.sum_identity_halfwidth = dc.delta0;
  return out;
}

// --- recurrences ------------------------------------------------------

namespace {
struct CacheKey {
  std::int32_t side;
  std::int32_t level;
  std::int64_t qre;
  std::int64_t qim;
  bool operator==(const CacheKey& o) const {
    return side == o.side && level == o.level && qre == o.qre && qim == o.qim;
  }
};
struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(std::uint64_t(k.side) << 32 | std::uint32_t(k.level));
    mix(std::uint64_t(k.qre));
    mix(std::uint64_t(k.qim));
    return std::size_t(h);
  }
};
constexpr double kQuantum = 1e-13;
}  // namespace

struct RecurrenceCache::Impl {
  std::unordered_map<CacheKey, Complex, CacheKeyHash> map;
  mutable std::mutex mu;
};

std::shared_ptr<RecurrenceCache::Impl> RecurrenceCache::make_impl() {
  return std::make_shared<Impl>();
}

std::size_t RecurrenceCache::size() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->map.size();
}

class RecurrenceEngine {
 public:
  RecurrenceEngine(const DerivedCoefficients& dc, const SplitPair& chi_split,
                   RecurrenceCache& cache)
      : dc_(dc), split_(chi_split), cache_(cache) {}

  Complex eval(int side, std::size_t n, Complex z) const {
    const CacheKey key{side, std::int32_t(n), llround(z.real() / kQuantum),
                       llround(z.imag() / kQuantum)};
    {
      std::lock_guard<std::mutex> lock(cache_.impl_->mu);
      auto it = cache_.impl_->map.find(key);
      if (it != cache_.impl_->map.end()) return it->second;
    }
    Complex v;
    if (n == 0) {
      v = (side == 0) ? split_.f_plus(z) / dc_.a1.eval(z)
                      : split_.f_minus(z) / dc_.aq.eval(z);
    } else {
      v = 0.0;
      if (side == 0) {
        for (std::size_t j = 0; j < dc_.betas.size(); ++j)
          v += dc_.b[j].eval(z) * eval(0, n - 1, z + dc_.betas[j]);
      } else {
        for (std::size_t j = 0; j < dc_.gammas.size(); ++j)
          v += dc_.c[j].eval(z) * eval(1, n - 1, z - dc_.gammas[j]);
      }
    }
    std::lock_guard<std::mutex> lock(cache_.impl_->mu);
    if (cache_.impl_->map.size() >= cache_.max_entries())
      throw CacheBudgetError(
          "recurrence cache budget exceeded; lower the level cap or coarsen the grid");
    cache_.impl_->map.emplace(key, v);
    return v;
  }

 private:
  const DerivedCoefficients& dc_;
  const SplitPair& split_;
  RecurrenceCache& cache_;
};

Complex g_recurrence_eval(std::size_t n, Complex z, const DerivedCoefficients& dc,
                          const SplitPair& chi_split, RecurrenceCache& cache) {
  return RecurrenceEngine(dc, chi_split, cache).eval(0, n, z);
}

Complex h_recurrence_eval(std::size_t n, Complex z, const DerivedCoefficients& dc,
                          const SplitPair& chi_split, RecurrenceCache& cache) {
  return RecurrenceEngine(dc, chi_split, cache).eval(1, n, z);
}

std::size_t compute_Na(double a, const DerivedCoefficients& dc) {
  if (!(a > 0.0)) throw std::invalid_argument("compute_Na: a > 0 required");
  const double beta2 = dc.betas.front();
  const double gamma_last = dc.gammas.back();
  const double reach = a + dc.delta0;
  const auto above = [](double x) {  // smallest integer strictly above x
    return std::size_t(std::max(0.0, std::floor(x))) + 1;
  };
  std::size_t n = std::max(above(reach / beta2), above(reach / gamma_last));
  n = std::max(n, std::size_t(std::ceil(a / (beta2 + gamma_last))));
  return std::max<std::size_t>(n, 1);
}

namespace {

// Extrapolates the remaining mass of a double-exponentially decaying term
// sequence from the last few finite sups.
double tail_from_trace(const std::vector<double>& sup, std::size_t N) {
  std::vector<std::pair<double, double>> pts;  // (n, log(-log s_n))
  for (std::size_t n = (N >= 5 ? N - 5 : 0); n <= N; ++n) {
    const double s = sup[n];
    if (s > 0.0 && s < 0.5) pts.emplace_back(double(n), std::log(-std::log(s)));
  }
  if (pts.size() < 2) return sup[N];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = double(pts.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icept = (sy - slope * sx) / m;
  if (!(slope > 0.0)) return sup[N];
  double tail = 0.0;
  for (std::size_t k = 1; k <= 60; ++k) {
    const double u = icept + slope * double(N + k);
    if (u > 7.0) break;  // addend below e^{-e^7} ~ 1e-476
    tail += std::exp(-std::exp(u));
  }
  return tail;
}

}  // namespace

SeriesSolution sum_series(const DerivedCoefficients& dc, const SplitPair& chi_split,
                          double a, double tol, std::size_t n_cap,
                          RecurrenceCache& cache, std::size_t grid_count) {
  if (!(a > 0.0) || !(tol > 0.0))
    throw std::invalid_argument("sum_series: a > 0 and tol > 0 required");

  SeriesSolution sol;
  sol.interval_halfwidth = a;
  sol.N_a = compute_Na(a, dc);
  if (sol.N_a > 100) {
    std::ostringstream os;
    os << "N_a = " << sol.N_a << " is large (small beta_2 or gamma_{q-1}); "
       << "expect an expensive run";
    sol.notes.push_back(os.str());
  }

  const auto xs = GridSpec(-a, a, grid_count).xs();
  RecurrenceEngine eng(dc, chi_split, cache);

  bool converged = false;
  for (std::size_t n = 0; n <= n_cap; ++n) {
    double sg = 0.0, sh = 0.0;
    for (double x : xs) {
      sg = std::max(sg, std::abs(eng.eval(0, n, Complex(x, 0.0))));
      sh = std::max(sh, std::abs(eng.eval(1, n, Complex(x, 0.0))));
    }
    sol.sup_g.push_back(sg);
    sol.sup_h.push_back(sh);
    if (n >= std::max<std::size_t>(sol.N_a, 1) && sol.sup_g[n] < tol &&
        sol.sup_h[n] < tol && sol.sup_g[n - 1] < tol && sol.sup_h[n - 1] < tol) {
      const double tail = tail_from_trace(sol.sup_g, n) + tail_from_trace(sol.sup_h, n);
      if (tail < tol) {
        sol.truncation_N = n;
        sol.tail_estimate = tail;
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "series did not converge to tol = " << tol << " within n_cap = " << n_cap
       << " levels (N_a = " << sol.N_a << ")";
    throw ConvergenceError(os.str(), sol.sup_g, sol.sup_h);
  }

  auto dcp = std::make_shared<DerivedCoefficients>(dc);
  auto sp = std::make_shared<SplitPair>(chi_split);
  auto cp = std::make_shared<RecurrenceCache>(cache);  // shares the memo store
  const std::size_t N = sol.truncation_N;
  sol.g_plus_eval = [dcp, sp, cp, N](double x) {
    RecurrenceEngine e(*dcp, *sp, *cp);
    Complex s = 0.0;
    for (std::size_t n = 0; n <= N; ++n) s += e.eval(0, n, Complex(x, 0.0));
    return s;
  };
  sol.g_minus_eval = [dcp, sp, cp, N](double x) {
    RecurrenceEngine e(*dcp, *sp, *cp);
    Complex s = 0.0;
    for (std::size_t n = 0; n <= N; ++n) s += e.eval(1, n, Complex(x, 0.0));
    return s;
  };
  return sol;
}

Solution solve(const DifferenceProblem& p, const SolveOptions& opts) {
  Solution sol;
  sol.validation = validate_problem(p);
  if (!sol.validation.pass()) {
    std::string msg = "problem failed validation";
    for (const auto& n : sol.validation.notes) msg += "; " + n;
    throw ValidationError(msg, sol.validation);
  }

  sol.dc = derive_coefficients(p, opts.C1, opts.delta0);
  RhsSplit rs = split_rhs(p, sol.dc, opts.split);
  sol.used_strategy = rs.used;
  sol.sum_identity_halfwidth = rs.sum_identity_halfwidth;

  RecurrenceCache cache(opts.cache_budget);
  sol.series = sum_series(sol.dc, rs.pair, opts.a, opts.tol, opts.n_cap, cache,
                          opts.grid_count);

  const double a1 = sol.dc.alpha1, aq = sol.dc.alphaq;
  auto gp = sol.series.g_plus_eval;
  auto gm = sol.series.g_minus_eval;
  sol.phi = [gp, gm, a1, aq](double x) { return gp(x - a1) + gm(x - aq); };
  return sol;
}

double residual(const DifferenceProblem& p, const std::function<Complex(double)>& phi,
                const GridSpec& grid) {
  double worst = 0.0;
  for (double x : grid.xs()) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < p.q(); ++j)
      s += p.coeffs[j].eval(Complex(x, 0.0)) * phi(x + p.alphas[j]);
    worst = std::max(worst, std::abs(s - p.chi_value(x)));
  }
  return worst;
}

std::function<Complex(double)> oracle_constant_coeff(const std::vector<double>& a,
                                                     const std::vector<double>& alphas,
                                                     double omega) {
  if (a.size() != alphas.size() || a.empty())
    throw std::invalid_argument("oracle_constant_coeff: size mismatch");
  Complex denom = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    denom += a[j] * std::exp(Complex(0.0, omega * alphas[j]));
    scale += std::abs(a[j]);
  }
  if (std::abs(denom) < 1e-12 * std::max(scale, 1.0))
    throw std::domain_error(
        "oracle_constant_coeff: the symbol sum a_j e^{i omega alpha_j} vanishes; "
        "no solution of this form");
  return [denom, omega](double x) {
    return std::exp(Complex(0.0, omega * x)) / denom;
  };
}

}  // namespace cdsolve
