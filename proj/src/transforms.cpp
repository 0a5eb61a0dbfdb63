#include "disct/transforms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "disct/poisson.hpp"

namespace disct {

namespace {

constexpr double kPi = std::numbers::pi;

// All points of the cube [lo, lo + side)^d in lexicographic order.
std::vector<LatticePoint> cube(int d, int lo, int side) {
  std::vector<LatticePoint> out;
  std::vector<int> c(static_cast<std::size_t>(d), lo);
  while (true) {
    out.emplace_back(c);
    int i = d - 1;
    while (i >= 0 && ++c[static_cast<std::size_t>(i)] == lo + side) c[static_cast<std::size_t>(i--)] = lo;
    if (i < 0) break;
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KernelTable::KernelTable(KernelKind kind, int d, QuadConfig cfg)
    : kind_(std::move(kind)), d_(d), cfg_(cfg) {
  if (d < 1) throw std::invalid_argument("KernelTable: d must be >= 1");
  if (kind_.tag != KernelTag::FiniteW && kind_.tag != KernelTag::HilbertDis &&
      kind_.tag != KernelTag::ProbHilbert && (kind_.k < 1 || kind_.k > d))
    throw std::invalid_argument("KernelTable: need 1 <= k <= d");
}

QuadResult KernelTable::get(const LatticePoint& n) {
  if (n.dim() != d_) throw std::invalid_argument("KernelTable: dimension mismatch");
  {
    std::shared_lock lock(mu_);
    auto it = values_.find(n);
    if (it != values_.end()) return it->second;
  }
  const QuadResult r = kernel_value(kind_, n, cfg_);
  std::unique_lock lock(mu_);
  return values_.emplace(n, r).first->second;
}

void KernelTable::fill_box(int R, int jobs) { fill(cube(d_, -R, 2 * R + 1), jobs); }

void KernelTable::fill(const std::vector<LatticePoint>& pts, int jobs) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) {
      try {
        get(pts[i]);
      } catch (...) {
        std::lock_guard lock(fail_mu);
        if (!failure) failure = std::current_exception();
        next = pts.size();
      }
    }
  };
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> ts;
    for (int j = 0; j < jobs; ++j) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

bool KernelTable::has(const LatticePoint& n) const {
  std::shared_lock lock(mu_);
  return values_.contains(n);
}

std::size_t KernelTable::size() const {
  std::shared_lock lock(mu_);
  return values_.size();
}

std::filesystem::path KernelTable::cache_file(const std::filesystem::path& dir) const {
  if (dir.empty() || kind_.tag == KernelTag::FiniteW) return {};
  std::ostringstream name;
  name << kind_.name() << "_d" << d_ << "_k" << kind_.k << "_rtol" << cfg_.rel_tol << "_atol"
       << cfg_.abs_tol << ".csv";
  return dir / name.str();
}

void KernelTable::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return;
  std::string line;
  std::getline(in, line);  // header
  std::unique_lock lock(mu_);
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != static_cast<std::size_t>(d_ + 5)) continue;
    if (std::stoi(cols[0]) != d_ || cols[1] != kind_.name() || std::stoi(cols[2]) != kind_.k) continue;
    LatticePoint n = LatticePoint::zero(d_);
    for (int i = 0; i < d_; ++i) n[i] = std::stoi(cols[static_cast<std::size_t>(3 + i)]);
    QuadResult r;
    r.value = std::stod(cols[static_cast<std::size_t>(3 + d_)]);
    r.abs_error = std::stod(cols[static_cast<std::size_t>(4 + d_)]);
    r.evals = 1;
    values_.emplace(n, r);
  }
}

void KernelTable::save(const std::filesystem::path& file) const {
  if (file.empty()) return;
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << "d,kind,k";
    for (int i = 1; i <= d_; ++i) out << ",n" << i;
    out << ",value,abs_err\n";
    std::shared_lock lock(mu_);
    for (const auto& [n, r] : values_) {
      out << d_ << ',' << kind_.name() << ',' << kind_.k;
      for (int c : n.coords) out << ',' << c;
      out << ',' << fmt(r.value) << ',' << fmt(r.abs_error) << '\n';
    }
  }
  std::filesystem::rename(tmp, file);
}

std::filesystem::path cache_directory() {
  const char* env = std::getenv("DISCT_CACHE");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path{};
}

ApplyResult apply_kernel(const Sequence& f, KernelTable& table, int R) {
  if (R < 1) throw std::invalid_argument("apply_kernel: R must be >= 1");
  const int d = f.dim();
  if (d != table.dim()) throw std::invalid_argument("apply_kernel: dimension mismatch");
  ApplyResult res;
  res.g = Sequence(d);
  if (f.empty()) return res;
  const auto offsets = cube(d, -R, 2 * R + 1);
  std::set<LatticePoint> out_pts;
  for (const auto& [m, v] : f.support())
    for (const auto& o : offsets) out_pts.insert(m + o);
  const bool conv = table.kind().translation_invariant();
  double C = 0.0;
  if (conv) {
    for (const auto& o : offsets) {
      if (o.is_zero()) continue;
      C = std::max(C, std::pow(o.norm(), d) * std::abs(table.get(o).value));
    }
  }
  double f1 = 0.0;
  for (const auto& [m, v] : f.support()) f1 += std::abs(v);
  for (const auto& n : out_pts) {
    double s = 0.0;
    for (const auto& [m, v] : f.support()) {
      const LatticePoint l = n - m;
      if (l.max_norm() > R) continue;
      // FiniteW kernels are not convolutions: K(n, m) with the pole above the origin
      const double k = conv ? table.get(l).value
                            : finite_w_kernel(n, m, table.kind().A, table.kind().w).value;
      s += k * v;
    }
    res.g.set(n, s);
  }
  res.tail_bound = C * f1 * std::pow(static_cast<double>(R), -d);
  return res;
}

ApplyResult apply_kernel(const Sequence& f, const KernelKind& kind, int R, const QuadConfig& cfg) {
  KernelTable table(kind, f.dim(), cfg);
  const auto file = table.cache_file(cache_directory());
  if (!file.empty()) table.load(file);
  const std::size_t before = table.size();
  ApplyResult r = apply_kernel(f, table, R);
  if (!file.empty() && table.size() != before) table.save(file);
  return r;
}

double lp_norm(const Sequence& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: need p >= 1");
  double s = 0.0;
  for (const auto& [n, v] : f.support()) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

double cot_bound(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("cot_bound: need 1 < p < inf");
  const double ps = std::max(p, p / (p - 1.0));
  return 1.0 / std::tan(kPi / (2.0 * ps));
}

double norm_ratio(const Sequence& f, KernelTable& table, double p, int R) {
  const double nf = lp_norm(f, p);
  if (nf == 0.0) throw DomainError("norm_ratio: f must be nonzero");
  return lp_norm(apply_kernel(f, table, R).g, p) / nf;
}

double norm_ratio(const Sequence& f, const KernelKind& kind, double p, int R, const QuadConfig& cfg) {
  const double nf = lp_norm(f, p);
  if (nf == 0.0) throw DomainError("norm_ratio: f must be nonzero");
  return lp_norm(apply_kernel(f, kind, R, cfg).g, p) / nf;
}

namespace {

// Finite section of the convolution operator on the box [0, B)^d, dense.
struct Section {
  std::vector<LatticePoint> pts;
  std::vector<double> a;  // row-major, size N*N
  std::size_t N = 0;

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      const double* row = &a[i * N];
      for (std::size_t j = 0; j < N; ++j) s += row[j] * x[j];
      y[i] = s;
    }
  }
  void apply_t(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      const double* row = &a[i * N];
      for (std::size_t j = 0; j < N; ++j) y[j] += row[j] * x[i];
    }
  }
};

Section build_section(KernelTable& table, int box) {
  Section s;
  s.pts = cube(table.dim(), 0, box);
  s.N = s.pts.size();
  s.a.resize(s.N * s.N);
  for (std::size_t i = 0; i < s.N; ++i)
    for (std::size_t j = 0; j < s.N; ++j) s.a[i * s.N + j] = table.get(s.pts[i] - s.pts[j]).value;
  return s;
}

double vec_lp(const std::vector<double>& v, double p) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

Sequence to_sequence(const Section& s, const std::vector<double>& x, int d) {
  Sequence f(d);
  for (std::size_t i = 0; i < s.N; ++i) f.set(s.pts[i], x[i]);
  return f;
}

}  // namespace

NormSearchResult norm_lower_bound_search(KernelTable& table, double p, int box, int budget,
                                         std::uint64_t seed) {
  if (budget < 1) throw std::invalid_argument("norm_lower_bound_search: budget must be >= 1");
  if (box < 2) throw std::invalid_argument("norm_lower_bound_search: box must be >= 2");
  if (!(p > 1.0)) throw DomainError("norm_lower_bound_search: need p > 1");
  if (!table.kind().translation_invariant())
    throw std::invalid_argument("norm_lower_bound_search: needs a convolution kernel");
  const int d = table.dim();
  const Section S = build_section(table, box);
  const std::size_t N = S.N;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  NormSearchResult res;

  std::vector<double> x(N), y, z;
  if (p == 2.0) {
    for (auto& v : x) v = normal(rng);
    for (int it = 0; it < budget; ++it) {
      S.apply(x, y);
      S.apply_t(y, z);
      const double nz = vec_lp(z, 2.0);
      if (nz == 0.0) break;
      for (std::size_t i = 0; i < N; ++i) x[i] = z[i] / nz;
      res.iterations = it + 1;
    }
    S.apply(x, y);
    res.best_ratio = vec_lp(y, 2.0) / vec_lp(x, 2.0);
    res.witness = to_sequence(S, x, d);
    return res;
  }

  // random restarts plus greedy single-coordinate moves, with Tx updated incrementally
  const int restarts = std::max(2, std::min(8, budget / 64 + 1));
  const int moves = std::max(1, budget / restarts);
  std::uniform_int_distribution<std::size_t> pick(0, N - 1);
  for (int r = 0; r < restarts; ++r) {
    if (r < 2) {
      // power profiles |t|^(-1/p) about the box centre, even then odd; these are
      // near-extremal for the continuous transform and beat random starts by far
      for (std::size_t i = 0; i < N; ++i) {
        double t = 0.0;
        for (int c : S.pts[i].coords) t += c - 0.5 * (box - 1);
        x[i] = (t >= 0 || r == 0 ? 1.0 : -1.0) * std::pow(std::abs(t) + 0.5, -1.0 / p);
      }
    } else {
      for (auto& v : x) v = normal(rng);
    }
    S.apply(x, y);
    double nx = vec_lp(x, p), best = vec_lp(y, p) / nx;
    double step = 0.5 * nx / std::sqrt(static_cast<double>(N));
    for (int it = 0; it < moves; ++it) {
      const std::size_t j = pick(rng);
      const double delta = step * normal(rng);
      x[j] += delta;
      for (std::size_t i = 0; i < N; ++i) y[i] += S.a[i * N + j] * delta;
      const double ratio = vec_lp(y, p) / vec_lp(x, p);
      if (ratio > best) {
        best = ratio;
      } else {
        x[j] -= delta;
        for (std::size_t i = 0; i < N; ++i) y[i] -= S.a[i * N + j] * delta;
        step *= 0.999;
      }
      ++res.iterations;
    }
    if (best > res.best_ratio) {
      res.best_ratio = best;
      res.witness = to_sequence(S, x, d);
    }
  }
  return res;
}

LittlewoodPaleyReport littlewood_paley_check(const Sequence& f, const Sequence& g, double p,
                                             const QuadConfig& cfg) {
  if (f.dim() != g.dim()) throw std::invalid_argument("littlewood_paley_check: dimension mismatch");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("littlewood_paley_check: need 1 < p < inf");
  const int d = f.dim();
  const double q = p / (p - 1.0);
  const double pstar = std::max(p, q);
  LittlewoodPaleyReport rep;
  rep.rhs = (pstar - 1.0) * lp_norm(f, p) * lp_norm(g, q);
  if (f.empty() || g.empty()) {
    rep.holds = true;
    return rep;
  }
  const PeriodicPoissonEvaluator& ev = default_evaluator(d);
  const int n1 = d + 1;
  auto grad_u = [n1](const Sequence& s, std::span<const double> x, double y, double h,
                     const double* gh, double* out) {
    std::fill(out, out + n1, 0.0);
    double gp[8];
    for (const auto& [n, v] : s.support()) {
      const double pn = poisson_value_grad(x, y, n.coords, std::span<double>(gp, static_cast<std::size_t>(n1)));
      for (int i = 0; i < n1; ++i) out[i] += v * (gp[i] - pn / h * gh[i]) / h;
    }
  };
  HalfspaceFn fn = [&](std::span<const double> x, double y) {
    double gh[8], gf[8], gg[8];
    const double h = ev.value_grad(x, y, std::span<double>(gh, static_cast<std::size_t>(n1)));
    grad_u(f, x, y, h, gh, gf);
    grad_u(g, x, y, h, gh, gg);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n1; ++i) {
      a += gf[i] * gf[i];
      b += gg[i] * gg[i];
    }
    return 2.0 * y * h * std::sqrt(a * b);
  };
  std::set<LatticePoint> pts;
  for (const auto& [n, v] : f.support()) pts.insert(n);
  for (const auto& [n, v] : g.support()) pts.insert(n);
  HalfspaceOptions opt;
  std::vector<double> lo(static_cast<std::size_t>(d), 1e300), hi(static_cast<std::size_t>(d), -1e300);
  for (const auto& n : pts) {
    std::vector<double> c(n.coords.begin(), n.coords.end());
    for (int i = 0; i < d; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
    }
    opt.centers.push_back({c, 0.0, 0.5});
  }
  opt.x_origin.resize(static_cast<std::size_t>(d));
  double span = 0.0;
  for (int i = 0; i < d; ++i) {
    opt.x_origin[static_cast<std::size_t>(i)] = 0.5 * (lo[static_cast<std::size_t>(i)] + hi[static_cast<std::size_t>(i)]);
    span = std::max(span, hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
  }
  opt.x_scale = std::max(1.0, 0.5 * span);
  const QuadResult r = integrate_halfspace(fn, d, cfg, opt);
  rep.lhs = r.value;
  rep.lhs_error = r.abs_error;
  rep.holds = rep.lhs <= rep.rhs + rep.lhs_error;
  return rep;
}

Sequence hdis_apply_reference(const Sequence& f, int R) {
  if (f.dim() != 1) throw std::invalid_argument("hdis_apply_reference: need d = 1");
  if (R < 0) throw std::invalid_argument("hdis_apply_reference: R must be >= 0");
  Sequence g(1);
  std::set<int> out;
  for (const auto& [m, v] : f.support())
    for (int o = -R; o <= R; ++o) out.insert(m[0] + o);
  for (int n : out) {
    double s = 0.0;
    for (const auto& [m, v] : f.support())
      if (n != m[0]) s += v / (kPi * (n - m[0]));
    g.set(LatticePoint{n}, s);
  }
  return g;
}

}  // namespace disct
