#include "disct/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace disct {

namespace {

// Genz-Malik degree 7 rule with embedded degree 5 rule on [-1,1]^n.
struct GenzMalik {
  int n;
  double l2, l4, l5;
  double w1, w2, w3, w4, w5;
  double v1, v2, v3, v4;
  std::vector<std::vector<double>> corners;  // (+-1, ..., +-1)

  explicit GenzMalik(int dim) : n(dim) {
    l2 = std::sqrt(9.0 / 70.0);
    l4 = std::sqrt(9.0 / 10.0);
    l5 = std::sqrt(9.0 / 19.0);
    const double nn = n;
    w1 = (12824.0 - 9120.0 * nn + 400.0 * nn * nn) / 19683.0;
    w2 = 980.0 / 6561.0;
    w3 = (1820.0 - 400.0 * nn) / 19683.0;
    w4 = 200.0 / 19683.0;
    w5 = 6859.0 / 19683.0 / std::ldexp(1.0, n);
    v1 = (729.0 - 950.0 * nn + 50.0 * nn * nn) / 729.0;
    v2 = 245.0 / 486.0;
    v3 = (265.0 - 100.0 * nn) / 1458.0;
    v4 = 25.0 / 729.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<double> c(n);
      for (int i = 0; i < n; ++i) c[i] = (mask >> i) & 1u ? 1.0 : -1.0;
      corners.push_back(std::move(c));
    }
  }

  std::size_t points() const {
    return 1 + 4 * n + 2 * n * (n - 1) + (std::size_t{1} << n);
  }
};

struct Box {
  std::vector<double> lo, hi;
  double value = 0.0, error = 0.0;
  int axis = 0;
  int part = 0;
  bool operator<(const Box& o) const { return error < o.error; }
};

class Evaluator {
 public:
  Evaluator(const GenzMalik& rule, const FnN& f) : r_(rule), f_(f), pt_(rule.n) {}

  void operator()(Box& b) {
    const int n = r_.n;
    std::vector<double> c(n), h(n);
    double vol = 1.0;
    for (int i = 0; i < n; ++i) {
      c[i] = 0.5 * (b.lo[i] + b.hi[i]);
      h[i] = 0.5 * (b.hi[i] - b.lo[i]);
      vol *= b.hi[i] - b.lo[i];
    }
    pt_ = c;
    const double f0 = call();
    double s2 = 0.0, s3 = 0.0, s4 = 0.0, s5 = 0.0;
    double best_diff = -1.0;
    int axis = 0;
    const double ratio = (r_.l2 / r_.l4) * (r_.l2 / r_.l4);
    for (int i = 0; i < n; ++i) {
      const double a = eval1(c, h, i, r_.l2) + eval1(c, h, i, -r_.l2);
      const double bb = eval1(c, h, i, r_.l4) + eval1(c, h, i, -r_.l4);
      s2 += a;
      s3 += bb;
      const double diff = std::abs(a - 2.0 * f0 - ratio * (bb - 2.0 * f0));
      if (diff > best_diff * (1.0 + 1e-12) || (diff >= best_diff * (1.0 - 1e-12) && h[i] > h[axis])) {
        best_diff = diff;
        axis = i;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int si = -1; si <= 1; si += 2)
          for (int sj = -1; sj <= 1; sj += 2) {
            for (int k = 0; k < n; ++k) pt_[k] = c[k];
            pt_[i] += si * r_.l4 * h[i];
            pt_[j] += sj * r_.l4 * h[j];
            s4 += call();
          }
    for (const auto& corner : r_.corners) {
      for (int k = 0; k < n; ++k) pt_[k] = c[k] + corner[k] * r_.l5 * h[k];
      s5 += call();
    }
    const double i7 = vol * (r_.w1 * f0 + r_.w2 * s2 + r_.w3 * s3 + r_.w4 * s4 + r_.w5 * s5);
    const double i5 = vol * (r_.v1 * f0 + r_.v2 * s2 + r_.v3 * s3 + r_.v4 * s4);
    b.value = i7;
    b.error = std::abs(i7 - i5);
    b.axis = axis;
  }

 private:
  double call() {
    const double v = f_(pt_);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "integrand not finite at (";
      for (std::size_t k = 0; k < pt_.size(); ++k) os << (k ? ", " : "") << pt_[k];
      os << ")";
      throw std::domain_error(os.str());
    }
    return v;
  }
  double eval1(const std::vector<double>& c, const std::vector<double>& h, int i, double s) {
    pt_ = c;
    pt_[i] += s * h[i];
    return call();
  }

  const GenzMalik& r_;
  const FnN& f_;
  std::vector<double> pt_;
};

QuadResult regions_1d(std::span<const CubatureRegion> regions, const QuadConfig& cfg) {
  // Rare path: combine independent 1D integrals with a split budget.
  QuadResult total;
  QuadConfig sub = cfg;
  sub.abs_tol = cfg.abs_tol / static_cast<double>(regions.size());
  for (const auto& r : regions) {
    const FnN& f = *r.f;
    auto res = integrate_1d([&f](double t) { return f(std::span<const double>(&t, 1)); },
                            r.lo[0], r.hi[0], sub);
    total.value += res.value;
    total.abs_error += res.abs_error;
    total.evals += res.evals;
  }
  return total;
}

}  // namespace

QuadResult integrate_regions(std::span<const CubatureRegion> regions, const QuadConfig& cfg) {
  if (regions.empty()) return {0.0, 0.0, 1};
  const int n = static_cast<int>(regions.front().lo.size());
  if (n < 1) throw std::invalid_argument("integrate_regions: empty dimension");
  if (n == 1) return regions_1d(regions, cfg);
  const GenzMalik rule(n);
  std::vector<Evaluator> evals;
  for (const auto& r : regions) evals.emplace_back(rule, *r.f);

  std::vector<Box> heap;
  double value = 0.0, error = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < regions.size(); ++p) {
    Box b;
    b.lo = regions[p].lo;
    b.hi = regions[p].hi;
    b.part = static_cast<int>(p);
    evals[p](b);
    count += rule.points();
    value += b.value;
    error += b.error;
    heap.push_back(std::move(b));
  }
  std::make_heap(heap.begin(), heap.end());
  std::size_t splits = 0;
  while (error > cfg.target(value)) {
    if (splits >= cfg.max_subdivisions) {
      QuadResult best{value, error, count};
      std::ostringstream os;
      os << "integrate_regions: no convergence after " << splits << " subdivisions, estimate "
         << value << " +- " << error;
      throw QuadratureError(os.str(), best);
    }
    std::pop_heap(heap.begin(), heap.end());
    Box top = std::move(heap.back());
    heap.pop_back();
    const int ax = top.axis;
    const double mid = 0.5 * (top.lo[ax] + top.hi[ax]);
    Box l = top, r = top;
    l.hi[ax] = mid;
    r.lo[ax] = mid;
    evals[top.part](l);
    evals[top.part](r);
    count += 2 * rule.points();
    ++splits;
    value += l.value + r.value - top.value;
    error += l.error + r.error - top.error;
    heap.push_back(std::move(l));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(std::move(r));
    std::push_heap(heap.begin(), heap.end());
    if (splits % 1024 == 0) {
      value = 0.0;
      error = 0.0;
      for (const auto& b : heap) {
        value += b.value;
        error += b.error;
      }
    }
  }
  return {value, error, count};
}

QuadResult integrate_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                         const QuadConfig& cfg, int initial_splits) {
  const std::size_t n = lo.size();
  if (hi.size() != n) throw std::invalid_argument("integrate_box: bound size mismatch");
  initial_splits = std::max(1, initial_splits);
  std::vector<CubatureRegion> regions;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(initial_splits);
  for (std::size_t idx = 0; idx < total; ++idx) {
    CubatureRegion r{&f, std::vector<double>(n), std::vector<double>(n)};
    std::size_t rem = idx;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rem % initial_splits;
      rem /= initial_splits;
      const double w = (hi[i] - lo[i]) / initial_splits;
      r.lo[i] = lo[i] + w * j;
      r.hi[i] = j + 1 == static_cast<std::size_t>(initial_splits) ? hi[i] : lo[i] + w * (j + 1);
    }
    regions.push_back(std::move(r));
  }
  return integrate_regions(regions, cfg);
}

}  // namespace disct
