#include "disct/mc_hprocess.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "disct/poisson.hpp"

namespace disct {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, path), so results do not depend on the worker count.
std::mt19937_64 path_rng(std::uint64_t seed, std::size_t path) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(path)));
}

HStrategy strategy_for(int d) { return d == 1 ? HStrategy::ClosedForm : HStrategy::Auto; }

void validate(const SdeConfig& cfg, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("h-process: need 1 <= d <= 3");
  if (!(cfg.boundary_factor > 0.0)) throw std::invalid_argument("h-process: boundary_factor must be positive");
  if (!(cfg.dt_base > 0.0)) throw std::invalid_argument("h-process: dt_base must be positive");
  if (!(cfg.y_floor > 0.0) || cfg.y_floor >= 0.1) throw std::invalid_argument("h-process: need 0 < y_floor < 0.1");
  if (!(cfg.w_start > cfg.y_floor)) throw std::invalid_argument("h-process: w_start must exceed y_floor");
  if (!(cfg.exit_tol > 0.0) || cfg.exit_tol >= 0.5) throw std::invalid_argument("h-process: need 0 < exit_tol < 1/2");
  if (cfg.paths < 1) throw std::invalid_argument("h-process: paths must be positive");
}

struct PathResult {
  LatticePoint exit;
  bool capped = false;
  std::size_t steps = 0;
  double integral = 0.0;
};

// Hook(x, y, h, grad h, dB, result) is called before every step with the left-point state.
template <class Hook>
PathResult run_path(const SdeConfig& cfg, int d, std::size_t path, const PeriodicPoissonEvaluator& ev,
                    Hook&& hook) {
  auto rng = path_rng(cfg.seed, path);
  std::normal_distribution<double> normal(0.0, 1.0);
  const HStrategy s = strategy_for(d);
  double x[3] = {0.0, 0.0, 0.0};
  double y = cfg.w_start;
  double gh[4], dB[4];
  PathResult r;
  const std::span<const double> xs(x, static_cast<std::size_t>(d));
  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    // h - 1 = O(e^{-2 pi y}) above y = 1, where the process is Brownian to high accuracy
    const double dt = std::min(cfg.dt_base * std::max(1.0, y * y), cfg.boundary_factor * y * y);
    const double sq = std::sqrt(dt);
    const double h = ev.value_grad(xs, y, std::span<double>(gh, static_cast<std::size_t>(d + 1)), s);
    for (int i = 0; i <= d; ++i) dB[i] = sq * normal(rng);
    hook(xs, y, h, gh, dB, r);
    for (int i = 0; i < d; ++i) x[i] += gh[i] / h * dt + dB[i];
    y += gh[d] / h * dt + dB[d];
    r.steps = step + 1;
    // away from the lattice the process is repelled from the boundary; an overshoot is reflected
    if (y <= 0.0) y = y < 0.0 ? -y : 0.5 * cfg.y_floor;
    if (y <= cfg.y_floor) {
      LatticePoint n = LatticePoint::zero(d);
      for (int i = 0; i < d; ++i) n[i] = static_cast<int>(std::nearbyint(x[i]));
      // from (x, y) the exit law is p_n / h, so this leaves at most exit_tol mass elsewhere
      if (poisson_p(xs, y, n.coords) >= (1.0 - cfg.exit_tol) * ev.value(xs, y, s)) {
        r.exit = std::move(n);
        return r;
      }
    }
  }
  r.capped = true;
  return r;
}

template <class Fn>
void parallel_paths(std::size_t paths, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (std::size_t p = 0; p < paths; ++p) fn(p);
    return;
  }
  std::vector<std::thread> ts;
  for (int j = 0; j < jobs; ++j)
    ts.emplace_back([&, j] {
      for (std::size_t p = static_cast<std::size_t>(j); p < paths; p += static_cast<std::size_t>(jobs)) fn(p);
    });
  for (auto& t : ts) t.join();
}

}  // namespace

ExitDistribution simulate_exit(const SdeConfig& cfg, int d) {
  validate(cfg, d);
  const PeriodicPoissonEvaluator& ev = default_evaluator(d);
  std::vector<PathResult> results(cfg.paths);
  parallel_paths(cfg.paths, cfg.jobs, [&](std::size_t p) {
    results[p] = run_path(cfg, d, p, ev, [](auto&&...) {});
  });
  ExitDistribution dist;
  dist.paths = cfg.paths;
  double steps = 0.0;
  for (const auto& r : results) {
    steps += static_cast<double>(r.steps);
    if (r.capped)
      ++dist.capped;
    else
      ++dist.counts[r.exit];
  }
  dist.mean_steps = steps / static_cast<double>(cfg.paths);
  return dist;
}

ChiSquareReport exit_law_chi2(const ExitDistribution& dist, int d, double w) {
  const PeriodicPoissonEvaluator& ev = default_evaluator(d);
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  const double h = ev.value(origin, w);
  const double N = static_cast<double>(dist.paths - dist.capped);
  if (N <= 0.0) throw NumericalError("exit_law_chi2: no exits");
  // bins: every lattice point whose expected count is >= 5; everything else pooled
  double stat = 0.0, expected_inside = 0.0;
  std::size_t observed_inside = 0;
  int bins = 0;
  const int R = static_cast<int>(std::ceil(std::pow(N, 1.0 / (d + 1)) * w)) + 1;
  std::vector<int> c(static_cast<std::size_t>(d), -R);
  while (true) {
    LatticePoint n(c);
    const double e = N * poisson_p(origin, w, n.coords) / h;
    if (e >= 5.0) {
      auto it = dist.counts.find(n);
      const double o = it == dist.counts.end() ? 0.0 : static_cast<double>(it->second);
      stat += (o - e) * (o - e) / e;
      expected_inside += e;
      observed_inside += static_cast<std::size_t>(o);
      ++bins;
    }
    int i = d - 1;
    while (i >= 0 && ++c[static_cast<std::size_t>(i)] > R) c[static_cast<std::size_t>(i--)] = -R;
    if (i < 0) break;
  }
  const double e_tail = N - expected_inside;
  const double o_tail = N - static_cast<double>(observed_inside);
  if (e_tail > 0.0) {
    stat += (o_tail - e_tail) * (o_tail - e_tail) / e_tail;
    ++bins;
  }
  ChiSquareReport rep;
  rep.statistic = stat;
  rep.dof = std::max(1, bins - 1);
  boost::math::chi_squared_distribution<double> chi(rep.dof);
  rep.p_value = boost::math::cdf(boost::math::complement(chi, stat));
  return rep;
}

ProjectionEstimate estimate_projection(const Sequence& f, const ConstantMatrix& A, const SdeConfig& cfg,
                                       const LatticePoint& n) {
  const int d = n.dim();
  if (d != 1 && d != 2) throw std::invalid_argument("estimate_projection: need d = 1 or 2");
  if (f.dim() != d || A.size() != d + 1) throw std::invalid_argument("estimate_projection: dimension mismatch");
  validate(cfg, d);
  const PeriodicPoissonEvaluator& ev = default_evaluator(d);
  const int n1 = d + 1;
  std::vector<PathResult> results(cfg.paths);
  parallel_paths(cfg.paths, cfg.jobs, [&](std::size_t p) {
    results[p] = run_path(cfg, d, p, ev,
                          [&](std::span<const double> x, double y, double h, const double* gh, const double* dB,
                              PathResult& r) {
                            double gu[4] = {0, 0, 0, 0}, gp[4], agu[4];
                            for (const auto& [m, v] : f.support()) {
                              const double pm = poisson_value_grad(x, y, m.coords,
                                                                   std::span<double>(gp, static_cast<std::size_t>(n1)));
                              for (int i = 0; i < n1; ++i) gu[i] += v * (gp[i] - pm / h * gh[i]) / h;
                            }
                            A.apply(gu, agu);
                            for (int i = 0; i < n1; ++i) r.integral += agu[i] * dB[i];
                          });
  });
  ProjectionEstimate est;
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  const double h0 = ev.value(origin, cfg.w_start);
  for (const auto& [m, v] : f.support()) est.m0 += v * poisson_p(origin, cfg.w_start, m.coords) / h0;
  // the terminal check needs the untransformed sum, so it is only meaningful for A = I
  double s = 0.0, s2 = 0.0, u = 0.0, u2 = 0.0;
  for (const auto& r : results) {
    if (r.capped) {
      ++est.capped;
      continue;
    }
    u += r.integral;
    u2 += r.integral * r.integral;
    if (r.exit == n) {
      ++est.hits;
      s += r.integral;
      s2 += r.integral * r.integral;
    }
  }
  if (est.hits < 100)
    throw NumericalError("estimate_projection: fewer than 100 paths exit at n; use more paths or a smaller w");
  const double k = static_cast<double>(est.hits);
  est.value = s / k;
  est.stderr_ = std::sqrt(std::max(0.0, s2 / k - est.value * est.value) / (k - 1.0));
  est.terminal_mean = est.m0 + est.value;
  est.terminal_stderr = est.stderr_;
  const double N = static_cast<double>(cfg.paths - est.capped);
  est.unconditioned_mean = u / N;
  est.unconditioned_stderr = std::sqrt(std::max(0.0, u2 / N - est.unconditioned_mean * est.unconditioned_mean) / (N - 1.0));
  return est;
}

std::vector<double> drift_field(const HalfSpacePoint& pt) {
  const int d = pt.dim();
  const PeriodicPoissonEvaluator& ev = default_evaluator(d);
  std::vector<double> g(static_cast<std::size_t>(d + 1));
  const double h = ev.value_grad(pt.x, pt.y, g);
  for (auto& v : g) v /= h;
  return g;
}

}  // namespace disct
