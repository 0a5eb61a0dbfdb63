#include "disct/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>

namespace disct {

namespace {

constexpr double kPi = std::numbers::pi;

void check_axis(int k, int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (k < 1 || k > d) throw std::invalid_argument("axis k must satisfy 1 <= k <= d");
}

double pow_half(double q, int twice_e) {
  // q^(twice_e / 2) for small positive twice_e
  const double r = std::sqrt(q);
  double v = 1.0;
  for (int i = 0; i < twice_e / 2; ++i) v *= q;
  return (twice_e % 2) ? v * r : v;
}

// Centers at the given boundary points, radii small enough that the balls stay disjoint.
std::vector<HalfspaceCenter> boundary_centers(const std::vector<std::vector<double>>& pts) {
  std::vector<HalfspaceCenter> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double r = 0.5;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (std::size_t a = 0; a < pts[i].size(); ++a)
        s += (pts[i][a] - pts[j][a]) * (pts[i][a] - pts[j][a]);
      r = std::min(r, 0.5 * std::sqrt(s));
    }
    out.push_back({pts[i], 0.0, r});
  }
  return out;
}

std::vector<double> to_double(const LatticePoint& n) {
  return std::vector<double>(n.coords.begin(), n.coords.end());
}

HalfspaceOptions options_between(const std::vector<double>& a, const std::vector<double>& b) {
  HalfspaceOptions opt;
  const std::size_t d = a.size();
  opt.x_origin.resize(d);
  double dist2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    opt.x_origin[i] = 0.5 * (a[i] + b[i]);
    dist2 += (a[i] - b[i]) * (a[i] - b[i]);
  }
  opt.x_scale = std::max(1.0, 0.5 * std::sqrt(dist2));
  opt.y_scale = opt.x_scale;
  return opt;
}

// n with axis k moved to the front, |n_k| first and the other magnitudes sorted.
// Returns the sign of n_k (0 if n_k = 0).
int canonical(const LatticePoint& n, int k, LatticePoint& out) {
  const int d = n.dim();
  const int nk = n[k - 1];
  std::vector<int> rest;
  for (int i = 0; i < d; ++i)
    if (i != k - 1) rest.push_back(std::abs(n[i]));
  std::sort(rest.begin(), rest.end(), std::greater<>());
  out = LatticePoint::zero(d);
  out[0] = std::abs(nk);
  for (int i = 1; i < d; ++i) out[i] = rest[static_cast<std::size_t>(i - 1)];
  return (nk > 0) - (nk < 0);
}

// grad(p_n / h) given p_n, grad p_n, h, grad h
void ratio_grad(double p, const double* gp, double h, const double* gh, int n, double* out) {
  const double ih = 1.0 / h;
  for (int i = 0; i < n; ++i) out[i] = (gp[i] - p * ih * gh[i]) * ih;
}

// 2y^3 / ((y^2 + a^2) sinh^2 y), finite at 0 and for large y
double hilbert_weight(double y, double a2) {
  if (y == 0.0) return 0.0;
  if (y > 350.0) return 0.0;
  const double s = std::sinh(y);
  return 2.0 * y * y * y / ((y * y + a2) * s * s);
}

double hilbert_correction(double z) {
  QuadConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  const double a2 = kPi * kPi * z * z;
  return integrate_semiinf([a2](double y) { return hilbert_weight(y, a2); }, cfg,
                           Decay::Exponential)
      .value;
}

}  // namespace

ConstantMatrix::ConstantMatrix(int n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
  if (n < 1 || a_.size() != static_cast<std::size_t>(n * n))
    throw std::invalid_argument("ConstantMatrix: need n*n entries");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      a_.data(), n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  norm_ = svd.singularValues()(0);
  orthogonal_ = ((m + m.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

ConstantMatrix ConstantMatrix::identity(int n) {
  std::vector<double> e(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i * n + i)] = 1.0;
  return ConstantMatrix(n, std::move(e));
}

ConstantMatrix ConstantMatrix::zero(int n) {
  return ConstantMatrix(n, std::vector<double>(static_cast<std::size_t>(n * n), 0.0));
}

void ConstantMatrix::apply(const double* v, double* out) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
}

ConstantMatrix hmatrix(int k, int d) {
  check_axis(k, d);
  const int n = d + 1;
  std::vector<double> e(static_cast<std::size_t>(n * n), 0.0);
  e[static_cast<std::size_t>((k - 1) * n + d)] = -1.0;
  e[static_cast<std::size_t>(d * n + (k - 1))] = 1.0;
  return ConstantMatrix(n, std::move(e));
}

std::string KernelKind::name() const {
  switch (tag) {
    case KernelTag::CzRiesz: return "cz";
    case KernelTag::ProbRiesz: return "prob";
    case KernelTag::Rotation: return "rot";
    case KernelTag::FiniteW: return "finite-w";
    case KernelTag::HilbertDis: return "hilbert-dis";
    case KernelTag::ProbHilbert: return "prob-hilbert";
  }
  return "unknown";
}

const PeriodicPoissonEvaluator& default_evaluator(int d) {
  static std::once_flag once[3];
  static std::unique_ptr<PeriodicPoissonEvaluator> ev[3];
  if (d < 1 || d > 3) throw std::invalid_argument("default_evaluator: need 1 <= d <= 3");
  std::call_once(once[d - 1], [d] { ev[d - 1] = std::make_unique<PeriodicPoissonEvaluator>(d); });
  return *ev[d - 1];
}

double cz_riesz_kernel(const LatticePoint& n, int k) {
  check_axis(k, n.dim());
  if (n.is_zero()) return 0.0;
  const int d = n.dim();
  const double r = n.norm();
  return poisson_constant(d) * n[k - 1] / std::pow(r, d + 1);
}

ProbIntegrands prob_integrands(std::span<const double> z, int k, std::span<const double> x, double y) {
  const int d = static_cast<int>(x.size());
  check_axis(k, d);
  if (z.size() != x.size()) throw std::invalid_argument("prob_integrands: dimension mismatch");
  double q0 = y * y, qz = y * y;
  for (int i = 0; i < d; ++i) {
    q0 += x[i] * x[i];
    qz += (x[i] - z[i]) * (x[i] - z[i]);
  }
  const double c = poisson_constant(d);
  const double base = c * c * (d + 1) * x[k - 1] * y * y / (pow_half(q0, d + 3) * pow_half(qz, d + 1));
  ProbIntegrands r;
  r.S = 2.0 * base;
  r.T = (4.0 / 3.0) * (d + 1) * base * y * y / qz;
  r.U = 4.0 * r.S - 3.0 * r.T;
  return r;
}

ProbIntegrands prob_integrands(const LatticePoint& n, int k, const HalfSpacePoint& pt) {
  const auto z = to_double(n);
  return prob_integrands(z, k, pt.x, pt.y);
}

QuadResult prob_integral(const LatticePoint& n, int k, ProbPart part, bool divide_by_h,
                         const QuadConfig& cfg) {
  const int d = n.dim();
  check_axis(k, d);
  if (n.is_zero()) throw DomainError("prob_integral: n must be nonzero");
  const auto z = to_double(n);
  const PeriodicPoissonEvaluator* ev = divide_by_h ? &default_evaluator(d) : nullptr;
  HalfspaceFn f = [&z, k, part, ev](std::span<const double> x, double y) {
    const auto r = prob_integrands(z, k, x, y);
    const double v = part == ProbPart::S ? r.S : part == ProbPart::T ? r.T : r.U;
    return ev ? v / ev->value(x, y) : v;
  };
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  HalfspaceOptions opt = options_between(origin, z);
  opt.centers = boundary_centers({origin, z});
  return integrate_halfspace(f, d, cfg, opt);
}

QuadResult prob_riesz_kernel(const LatticePoint& n, int k, const QuadConfig& cfg) {
  check_axis(k, n.dim());
  LatticePoint c;
  const int sign = canonical(n, k, c);
  if (sign == 0) return {0.0, 0.0, 1};
  QuadResult r = prob_integral(c, 1, ProbPart::U, true, cfg);
  r.value *= sign;
  return r;
}

double prob_hilbert_kernel_1d(long n) {
  if (n == 0) return 0.0;
  const double z = static_cast<double>(n);
  return (1.0 + hilbert_correction(z)) / (kPi * z);
}

namespace {

struct ProjectionSetup {
  std::vector<double> xn, xm;
  const PeriodicPoissonEvaluator* ev;
  const ConstantMatrix* A;
  int d;

  // 2 h (A grad(p_m/h)) . grad(p_n/h); the caller multiplies by its own weight
  double core(std::span<const double> x, double y) const {
    double gp_n[8], gp_m[8], gh[8], gn[8], gm[8], agm[8];
    const int n1 = d + 1;
    int in[7], im[7];
    for (int i = 0; i < d; ++i) {
      in[i] = static_cast<int>(xn[static_cast<std::size_t>(i)]);
      im[i] = static_cast<int>(xm[static_cast<std::size_t>(i)]);
    }
    const std::span<const int> sn(in, static_cast<std::size_t>(d)), sm(im, static_cast<std::size_t>(d));
    const double h = ev->value_grad(x, y, std::span<double>(gh, static_cast<std::size_t>(n1)));
    const double pn = poisson_value_grad(x, y, sn, std::span<double>(gp_n, static_cast<std::size_t>(n1)));
    const double pm = poisson_value_grad(x, y, sm, std::span<double>(gp_m, static_cast<std::size_t>(n1)));
    ratio_grad(pn, gp_n, h, gh, n1, gn);
    ratio_grad(pm, gp_m, h, gh, n1, gm);
    A->apply(gm, agm);
    double dot = 0.0;
    for (int i = 0; i < n1; ++i) dot += agm[i] * gn[i];
    return h * dot;
  }
};

void check_projection_args(const LatticePoint& n, const LatticePoint& m, const ConstantMatrix& A) {
  if (n.dim() != m.dim()) throw std::invalid_argument("projection kernel: dimension mismatch");
  if (A.size() != n.dim() + 1) throw std::invalid_argument("projection kernel: A must be (d+1)x(d+1)");
}

}  // namespace

QuadResult finite_w_kernel(const LatticePoint& n, const LatticePoint& m, const ConstantMatrix& A,
                           double w, const QuadConfig& cfg) {
  check_projection_args(n, m, A);
  if (!(w > 0.0)) throw DomainError("finite_w_kernel: w must be positive");
  const int d = n.dim();
  if (A.op_norm() == 0.0) return {0.0, 0.0, 1};
  ProjectionSetup s{to_double(n), to_double(m), &default_evaluator(d), &A, d};
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  const double pnw = poisson_p(origin, w, n.coords);
  HalfspaceFn f = [&s, w, pnw](std::span<const double> x, double y) {
    return green_w(x, y, w) / pnw * s.core(x, y);
  };
  HalfspaceOptions opt = options_between(s.xn, s.xm);
  std::vector<std::vector<double>> pts{s.xn};
  if (!(n == m)) pts.push_back(s.xm);
  opt.centers = boundary_centers(pts);
  for (auto& c : opt.centers) c.radius = std::min(c.radius, 0.5 * w);
  opt.centers.push_back({origin, w, std::min(0.5, 0.4 * w)});
  return integrate_halfspace(f, d, cfg, opt);
}

QuadResult limit_kernel(const LatticePoint& n, const LatticePoint& m, const ConstantMatrix& A,
                        const QuadConfig& cfg) {
  check_projection_args(n, m, A);
  const int d = n.dim();
  if (A.op_norm() == 0.0) return {0.0, 0.0, 1};
  ProjectionSetup s{to_double(n), to_double(m), &default_evaluator(d), &A, d};
  HalfspaceFn f = [&s](std::span<const double> x, double y) { return 2.0 * y * s.core(x, y); };
  HalfspaceOptions opt = options_between(s.xn, s.xm);
  std::vector<std::vector<double>> pts{s.xn};
  if (!(n == m)) pts.push_back(s.xm);
  opt.centers = boundary_centers(pts);
  return integrate_halfspace(f, d, cfg, opt);
}

double rotation_kernel_2d(const LatticePoint& n, int i) {
  if (n.dim() != 2) throw std::invalid_argument("rotation_kernel_2d: need d = 2");
  check_axis(i, 2);
  const int ni = n[i - 1];
  if (ni == 0) return 0.0;
  const int j = 3 - i;
  auto len = [&](int shift) {
    const double a = n[0] + (j == 1 ? shift : 0);
    const double b = n[1] + (j == 2 ? shift : 0);
    return std::hypot(a, b);
  };
  return (len(1) + len(-1) - 2.0 * n.norm()) / (2.0 * kPi * ni);
}

QuadResult rotation_kernel(const LatticePoint& n, int k, const QuadConfig& cfg) {
  const int d = n.dim();
  if (d < 2) throw std::invalid_argument("rotation_kernel: need d >= 2");
  check_axis(k, d);
  const int nk = n[k - 1];
  if (nk == 0) return {0.0, 0.0, 1};
  const int sign = nk > 0 ? 1 : -1;
  // after the swap of axes 1 and k the remaining coordinates only enter through
  // |n~ + w| with w symmetric, so their order and signs do not matter
  std::vector<double> rest;
  for (int i = 0; i < d; ++i)
    if (i != k - 1) rest.push_back(n[i]);
  const double n1 = std::abs(nk);
  const double c = poisson_constant(d);
  const double e = -0.5 * (d + 1);
  // uniform b and v on [0,1]^(d-1) enter only through w = v - b, whose density is
  // the tensor triangle prod (1 - |w_j|)
  FnN f = [&rest, n1, e, d](std::span<const double> w) {
    double q = n1 * n1, t = 1.0;
    for (int j = 0; j < d - 1; ++j) {
      const double a = rest[static_cast<std::size_t>(j)] + w[j];
      q += a * a;
      t *= 1.0 - std::abs(w[j]);
    }
    return t * std::pow(q, e);
  };
  const int m = d - 1;
  std::vector<CubatureRegion> regions;
  for (int mask = 0; mask < (1 << m); ++mask) {
    CubatureRegion r{&f, std::vector<double>(m), std::vector<double>(m)};
    for (int j = 0; j < m; ++j) {
      const bool neg = (mask >> j) & 1;
      r.lo[static_cast<std::size_t>(j)] = neg ? -1.0 : 0.0;
      r.hi[static_cast<std::size_t>(j)] = neg ? 0.0 : 1.0;
    }
    regions.push_back(std::move(r));
  }
  QuadResult q = integrate_regions(regions, cfg);
  const double scale = sign * c * n1;
  q.value *= scale;
  q.abs_error *= std::abs(scale);
  return q;
}

double continuous_prob_hilbert(double z) {
  if (z == 0.0 || !std::isfinite(z)) throw DomainError("continuous_prob_hilbert: pole at z = 0");
  if (std::abs(z) < 1.0) return 1.0 / (kPi * z);
  return (1.0 + hilbert_correction(z)) / (kPi * z);
}

QuadResult j_tail_l1_norm(const QuadConfig& cfg) {
  QuadConfig inner = cfg;
  inner.rel_tol = std::min(cfg.rel_tol, 1e-11);
  inner.abs_tol = std::min(cfg.abs_tol, 1e-14);
  // J(z) = K(z) - 1/(pi z) on |z| >= 1; odd, so ||J||_1 = 2 int_1^inf J
  auto J = [&inner](double z) {
    const double a2 = kPi * kPi * z * z;
    const double v =
        integrate_semiinf([a2](double y) { return hilbert_weight(y, a2); }, inner, Decay::Exponential)
            .value;
    return v / (kPi * z);
  };
  QuadResult r = integrate_semiinf([&J](double t) { return J(1.0 + t); }, cfg, Decay::Algebraic);
  r.value *= 2.0;
  r.abs_error *= 2.0;
  return r;
}

double fourier_bound_const() {
  QuadConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  const auto r = integrate_semiinf(
      [](double y) {
        if (y == 0.0 || y > 350.0) return 0.0;
        const double s = std::sinh(y);
        return y * std::log1p(y * y / (kPi * kPi)) / (s * s);
      },
      cfg, Decay::Exponential);
  return 1.0 + 2.0 / kPi * r.value;
}

QuadResult continuous_prob_riesz(std::span<const double> z, int k, const QuadConfig& cfg) {
  const int d = static_cast<int>(z.size());
  check_axis(k, d);
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  if (r2 == 0.0) throw DomainError("continuous_prob_riesz: pole at z = 0");
  const double c = poisson_constant(d);
  const double cz = c * z[static_cast<std::size_t>(k - 1)] / std::pow(std::sqrt(r2), d + 1);
  if (r2 < 1.0 || z[static_cast<std::size_t>(k - 1)] == 0.0) return {cz, 0.0, 1};
  const PeriodicPoissonEvaluator& ev = default_evaluator(d);
  const std::vector<double> zz(z.begin(), z.end());
  HalfspaceFn f = [&zz, k, &ev](std::span<const double> x, double y) {
    const double u = prob_integrands(zz, k, x, y).U;
    return u * (1.0 / ev.value(x, y) - 1.0);
  };
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  std::vector<std::vector<double>> pts{origin, zz};
  std::vector<double> near(zz);
  double dist2 = 0.0;
  for (auto& v : near) {
    const double r = std::nearbyint(v);
    dist2 += (v - r) * (v - r);
    v = r;
  }
  if (dist2 > 1e-12) pts.push_back(near);
  HalfspaceOptions opt = options_between(origin, zz);
  opt.centers = boundary_centers(pts);
  QuadResult q = integrate_halfspace(f, d, cfg, opt);
  q.value += cz;
  return q;
}

QuadResult kernel_value(const KernelKind& kind, const LatticePoint& n, const QuadConfig& cfg) {
  const int d = n.dim();
  // closed forms carry a round-off bound
  auto closed = [](double v, double rel) { return QuadResult{v, rel * std::abs(v), 1}; };
  constexpr double kEps = 8.0 * std::numeric_limits<double>::epsilon();
  switch (kind.tag) {
    case KernelTag::CzRiesz: return closed(cz_riesz_kernel(n, kind.k), kEps);
    case KernelTag::ProbRiesz: return prob_riesz_kernel(n, kind.k, cfg);
    case KernelTag::Rotation:
      if (d == 2) {
        // len(1) + len(-1) - 2|n| cancels down from size |n|
        const int nk = n[kind.k - 1];
        const double err = nk == 0 ? 0.0 : kEps * n.norm() / (2.0 * kPi * std::abs(nk));
        return {rotation_kernel_2d(n, kind.k), err, 1};
      }
      return rotation_kernel(n, kind.k, cfg);
    case KernelTag::FiniteW: return finite_w_kernel(n, LatticePoint::zero(d), kind.A, kind.w, cfg);
    case KernelTag::HilbertDis:
      if (d != 1) throw std::invalid_argument("hilbert-dis kernel needs d = 1");
      return closed(n[0] == 0 ? 0.0 : 1.0 / (kPi * n[0]), kEps);
    case KernelTag::ProbHilbert:
      if (d != 1) throw std::invalid_argument("prob-hilbert kernel needs d = 1");
      // the correction integral is computed to relative 1e-13
      return closed(prob_hilbert_kernel_1d(n[0]), 1e-13);
  }
  throw std::invalid_argument("kernel_value: unknown kind");
}

}  // namespace disct
