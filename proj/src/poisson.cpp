#include "disct/poisson.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace disct {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kNearRows = 8;  // d=2: rows |m2 - x2| <= 8 summed exactly, beyond via 2/a^2
constexpr int kWindow = 12;   // direct terms per row before the Euler-Maclaurin tail

// Midpoint Euler-Maclaurin: sum_{m>=K} f(m+s) = int_{t0}^inf f + sum_j c_j f^(2j-1)(t0),
// t0 = K - 1/2 + s, c_j = (1 - 2^(1-2j)) B_2j / (2j)!. The series is asymptotic with terms
// of size (2j)! / (2 pi t0)^2j, so 8 terms reach round-off for t0 >= 8.
constexpr int kEmTerms = 8;
constexpr int kOrder = 2 * kEmTerms;

struct EmCoefficients {
  double c[kEmTerms];
  double fact[kOrder + 1];
  EmCoefficients() {
    fact[0] = 1.0;
    for (int i = 1; i <= kOrder; ++i) fact[i] = fact[i - 1] * i;
    const double b[kEmTerms] = {1.0 / 6,  -1.0 / 30,     1.0 / 42, -1.0 / 30,
                                5.0 / 66, -691.0 / 2730, 7.0 / 6,  -3617.0 / 510};
    double fact = 1.0;
    for (int j = 1; j <= kEmTerms; ++j) {
      fact *= (2.0 * j - 1.0) * (2.0 * j);
      c[j - 1] = (1.0 - std::ldexp(1.0, 1 - 2 * j)) * b[j - 1] / fact;
    }
  }
};
const EmCoefficients kEm;

// q^beta for the half-integer exponents used here
double qpow(double q, double beta) {
  if (beta == -1.0) return 1.0 / q;
  if (beta == -1.5) return 1.0 / (q * std::sqrt(q));
  if (beta == -2.0) return 1.0 / (q * q);
  if (beta == -2.5) return 1.0 / (q * q * std::sqrt(q));
  if (beta == -3.0) return 1.0 / (q * q * q);
  return std::pow(q, beta);
}

struct TailIntegral {
  double v, da;
};

// int_{t0}^inf (t^2 + a^2)^beta dt for beta in {-1, -3/2, -2}
TailIntegral tail_integral(double t0, double a, double beta) {
  if (beta == -2.0) {
    const double z = a / t0;
    if (z < 0.1) {
      // binomial series in z^2, avoids the cancellation of the closed form
      double v = 0.0, dv = 0.0, zk = 1.0;
      for (int k = 0; k < 12; ++k) {
        const double sgn = k % 2 ? -1.0 : 1.0;
        v += sgn * (k + 1) * zk / (2 * k + 3);
        if (k > 0) dv += sgn * (k + 1) * 2.0 * k * (zk / z) / (2 * k + 3);
        zk *= z * z;
      }
      const double t3 = t0 * t0 * t0;
      return {v / t3, dv / (t3 * t0)};
    }
    const double q = t0 * t0 + a * a;
    const double F = (std::atan(z) - a * t0 / q) / (2.0 * a * a * a);
    return {F, -3.0 * F / a + t0 / (a * q * q)};
  }
  if (beta == -1.0) {
    const double z = a / t0;
    if (z < 1e-4) {
      const double z2 = z * z;
      return {(1.0 - z2 / 3.0 + z2 * z2 / 5.0) / t0, (-2.0 * z / 3.0 + 4.0 * z2 * z / 5.0) / (t0 * t0)};
    }
    const double at = std::atan(z);
    return {at / a, 1.0 / (t0 * (1.0 + z * z) * a) - at / (a * a)};
  }
  const double r = std::sqrt(t0 * t0 + a * a);
  const double v = 1.0 / ((r + t0) * r);
  return {v, -(a / r) * (2.0 * r + t0) / ((r + t0) * (r + t0) * r * r)};
}

struct PowerSum {
  double v = 0.0, dx = 0.0, da = 0.0;
};

// One-sided tail sum_{k>=0} f(t0 + 1/2 + k), f(t) = (t^2+a^2)^beta, with d/dt0 and d/da.
PowerSum power_tail(double t0, double a, double beta) {
  const double q0 = t0 * t0 + a * a;
  const double q1 = 2.0 * t0;
  const TailIntegral I = tail_integral(t0, a, beta);
  PowerSum s;
  s.v = I.v;
  s.da = I.da;
  // Taylor coefficients of q^beta (p) and q^(beta-1) (pm), advanced two orders per term
  double p[kOrder + 2], pm[kOrder + 1];
  p[0] = qpow(q0, beta);
  pm[0] = p[0] / q0;
  s.dx = -p[0];
  auto next = [q0, q1](double* c, double b, int k) {
    double v = ((b + 1.0) - k) * q1 * c[k - 1];
    if (k >= 2) v += (2.0 * (b + 1.0) - k) * c[k - 2];
    c[k] = v / (k * q0);
  };
  next(p, beta, 1);
  next(pm, beta - 1.0, 1);
  for (int j = 0; j < kEmTerms; ++j) {
    const int m = 2 * j + 1;
    next(p, beta, m + 1);
    if (m >= 2) next(pm, beta - 1.0, m);
    const double fm = kEm.fact[m];
    const double tv = kEm.c[j] * fm * p[m];
    s.v += tv;
    s.dx += kEm.c[j] * fm * (m + 1) * p[m + 1];
    s.da += kEm.c[j] * 2.0 * a * beta * fm * pm[m];
    if (std::abs(tv) < 1e-18 * std::abs(s.v)) break;
    if (m + 2 <= kOrder) {
      next(p, beta, m + 2);
      next(pm, beta - 1.0, m + 1);
    }
  }
  return s;
}

// sum_{m in Z} ((x - m)^2 + a^2)^beta for x in [-1/2, 1/2]; with window = false only the
// terms |m| > radius are kept.
PowerSum power_sum(double x, double a, double beta, int radius, bool window) {
  PowerSum s;
  if (window) {
    const double a2 = a * a;
    for (int m = -radius; m <= radius; ++m) {
      const double t = x - m;
      const double q = t * t + a2;
      const double qb = qpow(q, beta);
      const double qb1 = qb / q;
      s.v += qb;
      s.dx += 2.0 * beta * t * qb1;
      s.da += 2.0 * beta * a * qb1;
    }
  }
  const PowerSum r = power_tail(radius + 0.5 - x, a, beta);
  const PowerSum l = power_tail(radius + 0.5 + x, a, beta);
  s.v += r.v + l.v;
  s.dx += -r.dx + l.dx;
  s.da += r.da + l.da;
  return s;
}

// Fast x^(-3/2) path for the hot d=2 row sums.
PowerSum row_sum_32(double x, double a) {
  PowerSum s;
  const double a2 = a * a;
  for (int m = -kWindow; m <= kWindow; ++m) {
    const double t = x - m;
    const double q = t * t + a2;
    const double rq = 1.0 / q;
    const double qb = rq / std::sqrt(q);
    const double qb1 = qb * rq;
    s.v += qb;
    s.dx += -3.0 * t * qb1;
    s.da += -3.0 * a * qb1;
  }
  const PowerSum r = power_tail(kWindow + 0.5 - x, a, -1.5);
  const PowerSum l = power_tail(kWindow + 0.5 + x, a, -1.5);
  s.v += r.v + l.v;
  s.dx += -r.dx + l.dx;
  s.da += r.da + l.da;
  return s;
}

double reduce(double x) { return x - std::nearbyint(x); }

int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

double poisson_constant(int d) {
  if (d < 1) throw DomainError("poisson_constant: d must be >= 1");
  const double h = 0.5 * (d + 1);
  return std::tgamma(h) / std::pow(kPi, h);
}

double poisson_p(std::span<const double> x, double y, std::span<const int> n) {
  const int d = static_cast<int>(x.size());
  double r2 = y * y;
  for (int i = 0; i < d; ++i) {
    const double t = x[i] - (n.empty() ? 0.0 : n[i]);
    r2 += t * t;
  }
  return poisson_constant(d) * y / std::pow(r2, 0.5 * (d + 1));
}

double poisson_p(const HalfSpacePoint& pt, const LatticePoint& n) {
  if (n.dim() != pt.dim()) throw std::invalid_argument("poisson_p: dimension mismatch");
  return poisson_p(pt.x, pt.y, n.coords);
}

double poisson_value_grad(std::span<const double> x, double y, std::span<const int> n,
                          std::span<double> grad) {
  const int d = static_cast<int>(x.size());
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double t = x[i] - (n.empty() ? 0.0 : n[i]);
    r2 += t * t;
  }
  const double q = r2 + y * y;
  const double p = poisson_constant(d) * y / std::pow(q, 0.5 * (d + 1));
  for (int i = 0; i < d; ++i) {
    const double t = x[i] - (n.empty() ? 0.0 : n[i]);
    grad[i] = -(d + 1) * t / q * p;
  }
  grad[d] = (r2 - d * y * y) / (y * q) * p;
  return p;
}

std::vector<double> poisson_grad(const HalfSpacePoint& pt, const LatticePoint& n) {
  if (n.dim() != pt.dim()) throw std::invalid_argument("poisson_grad: dimension mismatch");
  std::vector<double> g(static_cast<std::size_t>(pt.dim() + 1));
  poisson_value_grad(pt.x, pt.y, n.coords, g);
  return g;
}

PeriodicPoissonEvaluator::PeriodicPoissonEvaluator(int d, double y_direct_max, double y_const_min)
    : d_(d), y_direct_max_(y_direct_max), y_const_min_(y_const_min) {
  if (d < 1 || d > 3) throw DomainError("PeriodicPoissonEvaluator: supported dimensions are 1..3");
  if (!(y_direct_max > 0.0 && y_direct_max < y_const_min))
    throw DomainError("PeriodicPoissonEvaluator: need 0 < y_direct_max < y_const_min");
  lattice_radius_ = kWindow;
  fourier_radius_ = fourier_terms(y_direct_max_);
}

int PeriodicPoissonEvaluator::fourier_terms(double y) const {
  // |n| >= |n|_inf, and the shell |n|_inf = k holds at most 2d (2k+1)^(d-1) points
  const double q = std::exp(-2.0 * kPi * y);
  for (int k = 1;; ++k) {
    const double shell = 2.0 * d_ * std::pow(2.0 * k + 3.0, d_ - 1) * std::pow(q, k + 1);
    if (shell / (1.0 - q) < 1e-15 || k > 100000) return k;
  }
}

HStrategy PeriodicPoissonEvaluator::resolve(double y, HStrategy s) const {
  if (s != HStrategy::Auto) return s;
  if (y <= y_direct_max_) return HStrategy::Direct;
  if (y < y_const_min_) return HStrategy::Fourier;
  return HStrategy::Constant;
}

double PeriodicPoissonEvaluator::value(std::span<const double> x, double y, HStrategy s) const {
  if (static_cast<int>(x.size()) != d_) throw std::invalid_argument("periodic_h: dimension mismatch");
  if (!(y > 0.0)) throw DomainError("periodic_h: y must be positive");
  switch (resolve(y, s)) {
    case HStrategy::Direct: return direct(x, y, nullptr);
    case HStrategy::Fourier: return fourier(x, y, nullptr);
    case HStrategy::ClosedForm:
      if (d_ != 1) throw DomainError("periodic_h: closed form exists only for d = 1");
      return closed_form(x[0], y, nullptr);
    default: return 1.0;
  }
}

double PeriodicPoissonEvaluator::value_grad(std::span<const double> x, double y,
                                            std::span<double> grad, HStrategy s) const {
  if (static_cast<int>(x.size()) != d_ || static_cast<int>(grad.size()) != d_ + 1)
    throw std::invalid_argument("periodic_h_grad: dimension mismatch");
  if (!(y > 0.0)) throw DomainError("periodic_h: y must be positive");
  switch (resolve(y, s)) {
    case HStrategy::Direct: return direct(x, y, grad.data());
    case HStrategy::Fourier: return fourier(x, y, grad.data());
    case HStrategy::ClosedForm:
      if (d_ != 1) throw DomainError("periodic_h: closed form exists only for d = 1");
      return closed_form(x[0], y, grad.data());
    default:
      for (auto& g : grad) g = 0.0;
      return 1.0;
  }
}

double PeriodicPoissonEvaluator::closed_form(double x, double y, double* grad) const {
  // h = sinh(2 pi y) / (cosh(2 pi y) - cos(2 pi x))
  const double s2x = std::sin(2.0 * kPi * x);
  const double c2x = std::cos(2.0 * kPi * x);
  if (y < 1.0) {
    const double sy = std::sinh(kPi * y);
    const double sx = std::sin(kPi * x);
    const double D = 2.0 * (sy * sy + sx * sx);
    const double S = std::sinh(2.0 * kPi * y);
    if (grad) {
      grad[0] = -2.0 * kPi * S * s2x / (D * D);
      grad[1] = 2.0 * kPi * (1.0 - std::cosh(2.0 * kPi * y) * c2x) / (D * D);
    }
    return S / D;
  }
  // divide through by cosh(2 pi y) to stay finite for large y
  const double e = 1.0 / std::cosh(2.0 * kPi * y);
  const double t = std::tanh(2.0 * kPi * y);
  const double D = 1.0 - c2x * e;
  if (grad) {
    grad[0] = -2.0 * kPi * t * e * s2x / (D * D);
    grad[1] = 2.0 * kPi * (e * e - e * c2x) / (D * D);
  }
  return t / D;
}

double PeriodicPoissonEvaluator::direct(std::span<const double> x, double y, double* grad) const {
  if (d_ == 1) {
    const double xr = reduce(x[0]);
    const PowerSum s = power_sum(xr, y, -1.0, kWindow, true);
    if (grad) {
      grad[0] = y / kPi * s.dx;
      grad[1] = s.v / kPi + y / kPi * s.da;
    }
    return y / kPi * s.v;
  }
  if (d_ == 2) {
    const double c = 0.5 / kPi;
    const double x1 = reduce(x[0]);
    const double x2 = reduce(x[1]);
    double v = 0.0, g1 = 0.0, g2 = 0.0, gy = 0.0;
    for (int m = -kNearRows; m <= kNearRows; ++m) {
      const double u = x2 - m;
      const double a = std::sqrt(u * u + y * y);
      const PowerSum r = row_sum_32(x1, a);
      v += r.v;
      g1 += r.dx;
      g2 += r.da * u / a;
      gy += r.da * y / a;
    }
    // far rows: each row sums to 2/a^2 up to O(exp(-2 pi a)), a > 6.5
    const PowerSum f = power_sum(x2, y, -1.0, kNearRows, false);
    const double h = c * y * v + y / kPi * f.v;
    if (grad) {
      grad[0] = c * y * g1;
      grad[1] = c * y * g2 + y / kPi * f.dx;
      grad[2] = c * v + c * y * gy + f.v / kPi + y / kPi * f.da;
    }
    return h;
  }
  // d = 3: rows along x1 for |(m2, m3)| <= kNearRows; the rows outside sum to the d = 2
  // kernel p(x' - m', y), whose exterior sum is again split into rows along x2.
  const double c3 = 1.0 / (kPi * kPi);
  const double c2 = 0.5 / kPi;
  const double x1 = reduce(x[0]), x2 = reduce(x[1]), x3 = reduce(x[2]);
  double v = 0.0, g[4] = {0, 0, 0, 0};
  for (int m3 = -kNearRows; m3 <= kNearRows; ++m3) {
    const double u3 = x3 - m3;
    for (int m2 = -kNearRows; m2 <= kNearRows; ++m2) {
      const double u2 = x2 - m2;
      const double a = std::sqrt(u2 * u2 + u3 * u3 + y * y);
      const PowerSum r = power_sum(x1, a, -2.0, kWindow, true);
      v += c3 * y * r.v;
      g[0] += c3 * y * r.dx;
      g[1] += c3 * y * r.da * u2 / a;
      g[2] += c3 * y * r.da * u3 / a;
      g[3] += c3 * r.v + c3 * y * r.da * y / a;
    }
    const double a3 = std::sqrt(u3 * u3 + y * y);
    const PowerSum t = power_sum(x2, a3, -1.5, kNearRows, false);
    v += c2 * y * t.v;
    g[1] += c2 * y * t.dx;
    g[2] += c2 * y * t.da * u3 / a3;
    g[3] += c2 * t.v + c2 * y * t.da * y / a3;
  }
  const PowerSum f = power_sum(x3, y, -1.0, kNearRows, false);
  v += y / kPi * f.v;
  g[2] += y / kPi * f.dx;
  g[3] += f.v / kPi + y / kPi * f.da;
  if (grad)
    for (int i = 0; i < 4; ++i) grad[i] = g[i];
  return v;
}

double PeriodicPoissonEvaluator::fourier(std::span<const double> x, double y, double* grad) const {
  const int N = fourier_terms(y);
  const double w = 2.0 * kPi;
  std::vector<double> cs(static_cast<std::size_t>(d_ * (N + 1))), sn(cs.size());
  for (int i = 0; i < d_; ++i)
    for (int k = 0; k <= N; ++k) {
      cs[i * (N + 1) + k] = std::cos(w * k * x[i]);
      sn[i * (N + 1) + k] = std::sin(w * k * x[i]);
    }
  // sum over n in [0, N]^d with weight 2^(#nonzero); h = sum e^{-2 pi |n| y} prod cos(2 pi n_i x_i)
  double v = 0.0;
  double g[4] = {0, 0, 0, 0};
  std::vector<int> n(static_cast<std::size_t>(d_), 0);
  const int total = ipow(N + 1, d_);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    double r2 = 0.0;
    int nz = 0;
    for (int i = 0; i < d_; ++i) {
      n[i] = rem % (N + 1);
      rem /= (N + 1);
      r2 += static_cast<double>(n[i]) * n[i];
      nz += n[i] != 0;
    }
    const double r = std::sqrt(r2);
    const double e = std::ldexp(std::exp(-w * r * y), nz);
    double prod = e;
    for (int i = 0; i < d_; ++i) prod *= cs[i * (N + 1) + n[i]];
    v += prod;
    if (grad) {
      for (int i = 0; i < d_; ++i) {
        double gi = -w * n[i] * e * sn[i * (N + 1) + n[i]];
        for (int j = 0; j < d_; ++j)
          if (j != i) gi *= cs[j * (N + 1) + n[j]];
        g[i] += gi;
      }
      g[d_] += -w * r * prod;
    }
  }
  if (grad)
    for (int i = 0; i <= d_; ++i) grad[i] = g[i];
  return v;
}

double PeriodicPoissonEvaluator::boundary_sum(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_) throw std::invalid_argument("boundary_sum: dimension mismatch");
  if (d_ == 1) {
    const double xr = reduce(x[0]);
    if (xr == 0.0) throw DomainError("boundary_sum: x is a lattice point");
    return power_sum(xr, 0.0, -1.0, kWindow, true).v;
  }
  if (d_ == 2) {
    const double x1 = reduce(x[0]);
    const double x2 = reduce(x[1]);
    if (x1 == 0.0 && x2 == 0.0) throw DomainError("boundary_sum: x is a lattice point");
    double v = 0.0;
    for (int m = -kNearRows; m <= kNearRows; ++m) v += row_sum_32(x1, std::abs(x2 - m)).v;
    return v + 2.0 * power_sum(x2, 0.0, -1.0, kNearRows, false).v;
  }
  const double x1 = reduce(x[0]), x2 = reduce(x[1]), x3 = reduce(x[2]);
  if (x1 == 0.0 && x2 == 0.0 && x3 == 0.0) throw DomainError("boundary_sum: x is a lattice point");
  double v = 0.0, ext = 0.0;
  for (int m3 = -kNearRows; m3 <= kNearRows; ++m3) {
    const double u3 = x3 - m3;
    for (int m2 = -kNearRows; m2 <= kNearRows; ++m2) {
      const double u2 = x2 - m2;
      v += power_sum(x1, std::sqrt(u2 * u2 + u3 * u3), -2.0, kWindow, true).v;
    }
    ext += power_sum(x2, std::abs(u3), -1.5, kNearRows, false).v;
  }
  // each outer row sums to pi / (2 b^3)
  ext += 2.0 * power_sum(x3, 0.0, -1.0, kNearRows, false).v;
  return v + 0.5 * kPi * ext;
}

double periodic_h(const HalfSpacePoint& pt, const PeriodicPoissonEvaluator& ev) {
  return ev.value(pt.x, pt.y);
}

std::vector<double> periodic_h_grad(const HalfSpacePoint& pt, const PeriodicPoissonEvaluator& ev) {
  std::vector<double> g(static_cast<std::size_t>(pt.dim() + 1));
  ev.value_grad(pt.x, pt.y, g);
  return g;
}

double green_w(std::span<const double> x, double y, double w) {
  const int d = static_cast<int>(x.size());
  if (!(y > 0.0) || !(w > 0.0)) throw DomainError("green_w: need y > 0 and w > 0");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double rm2 = r2 + (y - w) * (y - w);
  const double rp2 = r2 + (y + w) * (y + w);
  if (rm2 == 0.0) throw DomainError("green_w: evaluation at the pole (0, w)");
  if (d == 1) return std::log1p(4.0 * y * w / rm2) / (2.0 * kPi);
  const double K = std::tgamma(0.5 * (d - 1)) / (2.0 * std::pow(kPi, 0.5 * (d + 1)));
  // a^-(d-1) - b^-(d-1) = (b - a) sum_j b^j a^(d-2-j) / (a b)^(d-1), free of cancellation
  const double a = std::sqrt(rm2), b = std::sqrt(rp2);
  const double diff = 4.0 * y * w / (a + b);
  double s = 0.0, bj = 1.0;
  for (int j = 0; j <= d - 2; ++j) {
    s += bj * std::pow(a, d - 2 - j);
    bj *= b;
  }
  return K * diff * s / std::pow(a * b, d - 1);
}

double green_w(const HalfSpacePoint& pt, double w) { return green_w(pt.x, pt.y, w); }

double g_bound(double t, int d) {
  if (d < 1) throw DomainError("g_bound: d must be >= 1");
  if (t < 0.0) throw DomainError("g_bound: t must be nonnegative");
  if (t == 1.0) throw DomainError("g_bound: pole at t = 1");
  if (d == 1) {
    if (t == 0.0) return 2.0;
    return std::log1p(4.0 * t / ((t - 1.0) * (t - 1.0))) / (2.0 * t);
  }
  return std::pow(2.0, 0.5 * (d + 1)) * std::pow(std::abs(t - 1.0), -(d + 1.0));
}

double psi_boundary(std::span<const double> x, const PeriodicPoissonEvaluator& ev) {
  const int d = static_cast<int>(x.size());
  if (d != ev.dim()) throw std::invalid_argument("psi_boundary: dimension mismatch");
  // nearest lattice point and distances
  double dist2 = 0.0, norm2 = 0.0;
  bool origin = true;
  for (double xi : x) {
    const double n = std::nearbyint(xi);
    dist2 += (xi - n) * (xi - n);
    norm2 += xi * xi;
    origin = origin && n == 0.0;
  }
  if (dist2 == 0.0) return origin ? 1.0 : 0.0;
  if (d == 1) {
    const double s = std::sin(kPi * x[0]) / (kPi * x[0]);
    return s * s;
  }
  if (dist2 < 1e-12) {
    // dominant term of the denominator is |x - n|^-(d+1)
    if (origin) return 1.0;
    return std::pow(dist2 / norm2, 0.5 * (d + 1));
  }
  return 1.0 / (std::pow(norm2, 0.5 * (d + 1)) * ev.boundary_sum(x));
}

double psi_boundary(std::span<const double> x) {
  const PeriodicPoissonEvaluator ev(static_cast<int>(x.size()));
  return psi_boundary(x, ev);
}

double harmonic_extension(const Sequence& f, const HalfSpacePoint& pt,
                          const PeriodicPoissonEvaluator& ev) {
  if (f.dim() != pt.dim()) throw std::invalid_argument("harmonic_extension: dimension mismatch");
  double s = 0.0;
  for (const auto& [n, v] : f.support()) s += v * poisson_p(pt, n);
  return s / ev.value(pt.x, pt.y);
}

}  // namespace disct
