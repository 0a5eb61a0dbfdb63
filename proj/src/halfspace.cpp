#include "disct/numerics.hpp"

#include <cmath>
#include <numbers>

namespace disct {

namespace {

constexpr double kPi = std::numbers::pi;

// 1 on [0, 1/2], quintic smoothstep down to 0 at 1.
double bump(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double t = 2.0 * (s - 0.5);
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

struct PolarPart {
  const HalfspaceFn* f;
  const std::vector<HalfspaceCenter>* centers;
  std::size_t index;
  int d;

  double operator()(std::span<const double> u) const {
    const HalfspaceCenter& c = (*centers)[index];
    const double rho = u[0];
    double xbuf[8];
    std::span<double> x(xbuf, static_cast<std::size_t>(d));
    double y, jac;
    if (d == 1) {
      x[0] = c.x[0] + rho * std::cos(u[1]);
      y = c.y + rho * std::sin(u[1]);
      jac = rho;
    } else {
      const double t1 = u[1];
      const double st = std::sin(t1);
      y = c.y + rho * std::cos(t1);
      // unit vector in R^d from angles u[2..d]
      double prod = 1.0, jw = 1.0;
      for (int i = 0; i < d - 1; ++i) {
        const double phi = u[2 + i];
        x[i] = prod * std::cos(phi);
        jw *= std::pow(std::sin(phi), d - 2 - i);
        prod *= std::sin(phi);
      }
      x[d - 1] = prod;
      for (int i = 0; i < d; ++i) x[i] = c.x[i] + rho * st * x[i];
      jac = std::pow(rho, d) * std::pow(st, d - 1) * jw;
    }
    if (y <= 0.0) return 0.0;
    const double w = bump(rho / c.radius);
    if (w == 0.0 || jac == 0.0) return 0.0;
    return (*f)(std::span<const double>(x.data(), x.size()), y) * w * jac;
  }
};

struct CartesianPart {
  const HalfspaceFn* f;
  const HalfspaceOptions* opt;
  int d;

  double operator()(std::span<const double> u) const {
    double xbuf[8];
    double jac = 1.0;
    for (int i = 0; i < d; ++i) {
      const double t = u[i];
      const double q = 1.0 - t * t;
      const double o = opt->x_origin.empty() ? 0.0 : opt->x_origin[i];
      xbuf[i] = o + opt->x_scale * t / q;
      jac *= opt->x_scale * (1.0 + t * t) / (q * q);
    }
    const double s = u[d];
    const double y = opt->y_scale * s / (1.0 - s);
    jac *= opt->y_scale / ((1.0 - s) * (1.0 - s));
    double keep = 1.0;
    for (const auto& c : opt->centers) {
      double r2 = (y - c.y) * (y - c.y);
      for (int i = 0; i < d; ++i) r2 += (xbuf[i] - c.x[i]) * (xbuf[i] - c.x[i]);
      keep -= bump(std::sqrt(r2) / c.radius);
    }
    if (keep <= 0.0 || !std::isfinite(jac) || y <= 0.0) return 0.0;
    return (*f)(std::span<const double>(xbuf, static_cast<std::size_t>(d)), y) * keep * jac;
  }
};

}  // namespace

QuadResult integrate_halfspace(const HalfspaceFn& f, int d, const QuadConfig& cfg,
                               const HalfspaceOptions& opt) {
  if (d < 1 || d > 7) throw std::invalid_argument("integrate_halfspace: need 1 <= d <= 7");
  for (const auto& c : opt.centers) {
    if (static_cast<int>(c.x.size()) != d || c.radius <= 0.0 || c.y < 0.0)
      throw std::invalid_argument("integrate_halfspace: bad center");
    if (c.y > 0.0 && c.radius > c.y)
      throw std::invalid_argument("integrate_halfspace: interior ball crosses the boundary");
  }
  const int dim = d + 1;
  std::vector<FnN> fns;
  fns.reserve(opt.centers.size() + 1);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> boxes;
  std::vector<int> owner;

  for (std::size_t ci = 0; ci < opt.centers.size(); ++ci) {
    const auto& c = opt.centers[ci];
    fns.emplace_back(PolarPart{&f, &opt.centers, ci, d});
    std::vector<double> lo(dim, 0.0), hi(dim, 0.0);
    hi[0] = c.radius;
    const bool half = c.y == 0.0;
    if (d == 1) {
      hi[1] = half ? kPi : 2.0 * kPi;
    } else {
      hi[1] = half ? 0.5 * kPi : kPi;
      for (int i = 0; i < d - 1; ++i) hi[2 + i] = (i == d - 2) ? 2.0 * kPi : kPi;
    }
    // split the radial direction so the smooth taper has its own cells
    std::vector<double> mid_lo = lo, mid_hi = hi;
    mid_hi[0] = 0.5 * c.radius;
    boxes.emplace_back(mid_lo, mid_hi);
    owner.push_back(static_cast<int>(ci));
    mid_lo[0] = 0.5 * c.radius;
    mid_hi[0] = c.radius;
    boxes.emplace_back(mid_lo, mid_hi);
    owner.push_back(static_cast<int>(ci));
  }
  fns.emplace_back(CartesianPart{&f, &opt, d});
  const int cart = static_cast<int>(fns.size()) - 1;
  const int splits = std::max(1, opt.initial_splits);
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(splits);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> lo(dim), hi(dim);
    std::size_t rem = idx;
    for (int i = 0; i < dim; ++i) {
      const int j = static_cast<int>(rem % splits);
      rem /= splits;
      const double a = i < d ? -1.0 : 0.0;
      const double w = (1.0 - a) / splits;
      lo[i] = a + w * j;
      hi[i] = j + 1 == splits ? 1.0 : a + w * (j + 1);
    }
    boxes.emplace_back(lo, hi);
    owner.push_back(cart);
  }
  std::vector<CubatureRegion> regions;
  regions.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i)
    regions.push_back({&fns[owner[i]], boxes[i].first, boxes[i].second});
  return integrate_regions(regions, cfg);
}

}  // namespace disct
