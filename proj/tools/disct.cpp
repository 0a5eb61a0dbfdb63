// disct: command-line front end for the kernel, multiplier, norm and Monte Carlo computations.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "disct/kernels.hpp"
#include "disct/mc_hprocess.hpp"
#include "disct/multipliers.hpp"
#include "disct/numerics.hpp"
#include "disct/transforms.hpp"

using namespace disct;
using json = nlohmann::ordered_json;

namespace {

struct JobSpec {
  std::string command;
  std::string kind;  // per-command default
  int d = 0;         // per-command default
  int k = 1;
  int radius = 5;
  bool full = false;
  int which = 1;
  std::vector<double> p{2.0};
  double rtol = 1e-5;
  double atol = 1e-9;
  std::string out;
  std::uint64_t seed = 1;
  int jobs = 1;
  // multiplier / pkernel
  std::size_t grid = 0;
  bool pmult = false;
  // norms
  int box = 256;
  int budget = 200;
  // mc
  double w = 2.0;
  std::size_t paths = 100000;
  std::string mode = "exit";
  std::vector<int> exit_point{1};
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

QuadConfig quad(const JobSpec& s) {
  QuadConfig c;
  c.rel_tol = s.rtol;
  c.abs_tol = s.atol;
  return c;
}

KernelKind parse_kind(const std::string& name, int k) {
  if (name == "cz") return KernelKind::cz_riesz(k);
  if (name == "prob") return KernelKind::prob_riesz(k);
  if (name == "rot") return KernelKind::rotation(k);
  if (name == "hilbert-dis") return KernelKind::hilbert_dis();
  if (name == "prob-hilbert") return KernelKind::prob_hilbert();
  throw UsageError("unknown kernel kind '" + name + "'");
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// every n in [0, R]^d (or [-R, R]^d), lexicographic
std::vector<LatticePoint> box_points(int d, int R, bool full) {
  const int lo = full ? -R : 0;
  std::vector<LatticePoint> pts;
  std::vector<int> c(static_cast<std::size_t>(d), lo);
  while (true) {
    pts.emplace_back(c);
    int i = d - 1;
    while (i >= 0 && ++c[static_cast<std::size_t>(i)] > R) c[static_cast<std::size_t>(i--)] = lo;
    if (i < 0) break;
  }
  return pts;
}

// a table backed by the DISCT_CACHE directory when set
struct CachedTable {
  KernelTable table;
  std::filesystem::path file;
  std::size_t loaded = 0;

  CachedTable(KernelKind kind, int d, const QuadConfig& cfg) : table(std::move(kind), d, cfg) {
    file = table.cache_file(cache_directory());
    if (!file.empty()) {
      table.load(file);
      loaded = table.size();
    }
  }
  void fill(const std::vector<LatticePoint>& pts, int jobs) {
    try {
      table.fill(pts, jobs);
    } catch (...) {
      persist();
      throw;
    }
    persist();
  }
  void persist() const {
    if (!file.empty() && table.size() != loaded) table.save(file);
  }
};

void validate_dk(const JobSpec& s, const KernelKind& kind) {
  if (s.d < 1 || s.d > 3) throw UsageError("--d must be 1, 2 or 3");
  if (s.k < 1 || s.k > s.d) throw UsageError("--k must be in 1..d");
  if ((kind.tag == KernelTag::HilbertDis || kind.tag == KernelTag::ProbHilbert) && s.d != 1)
    throw UsageError("hilbert kernels need --d 1");
  if (kind.tag == KernelTag::Rotation && s.d < 2) throw UsageError("rot needs --d >= 2");
  if (s.radius < 0) throw UsageError("--radius must be >= 0");
}

int cmd_kernel(const JobSpec& s) {
  const KernelKind kind = parse_kind(s.kind, s.k);
  validate_dk(s, kind);
  const auto pts = box_points(s.d, s.radius, s.full);
  CachedTable t(kind, s.d, quad(s));
  Output out(s.out);
  auto& os = out.stream();
  for (int i = 1; i <= s.d; ++i) os << 'n' << i << ',';
  os << "value,abs_err\n";
  int rc = 0;
  try {
    t.fill(pts, s.jobs);
  } catch (const QuadratureError& e) {
    std::cerr << "disct: " << e.what() << '\n';
    rc = 1;
  }
  for (const auto& n : pts) {
    // after a failure only the rows that were computed are emitted
    if (rc != 0 && !t.table.has(n)) continue;
    const QuadResult r = t.table.get(n);
    for (int c : n.coords) os << c << ',';
    os << fmt(r.value) << ',' << fmt(r.abs_error) << '\n';
  }
  return rc;
}

int cmd_table(const JobSpec& s) {
  if (s.which < 1 || s.which > 3) throw UsageError("--which must be 1, 2 or 3");
  if (s.radius < 1) throw UsageError("--radius must be >= 1");
  const QuadConfig cfg = quad(s);
  const auto pts = box_points(2, s.radius, false);
  CachedTable prob(KernelKind::prob_riesz(1), 2, cfg);
  CachedTable rot(KernelKind::rotation(1), 2, cfg);
  CachedTable cz(KernelKind::cz_riesz(1), 2, cfg);
  Output out(s.out);
  auto& os = out.stream();
  if (s.which == 1)
    os << "n1,n2,prob,prob_abs_err,rot,rot_abs_err,cz,cz_abs_err\n";
  else
    os << "n1,n2,ratio,abs_err\n";
  for (const auto& n : pts) {
    QuadResult a, r, c;
    try {
      if (s.which == 1 || s.which == 2) a = prob.table.get(n);
      if (s.which == 1 || s.which == 3) r = rot.table.get(n);
      c = cz.table.get(n);
    } catch (const QuadratureError& e) {
      prob.persist();
      rot.persist();
      std::cerr << "disct: " << e.what() << " at (" << n[0] << ',' << n[1] << ")\n";
      return 1;
    }
    os << n[0] << ',' << n[1] << ',';
    if (s.which == 1) {
      os << fmt(a.value) << ',' << fmt(a.abs_error) << ',' << fmt(r.value) << ',' << fmt(r.abs_error) << ','
         << fmt(c.value) << ',' << fmt(c.abs_error) << '\n';
    } else if (n[0] == 0) {
      // every kernel vanishes on n1 = 0; the ratio is set to 1 there
      os << "1,0\n";
    } else {
      const QuadResult& num = s.which == 2 ? a : r;
      os << fmt(num.value / c.value) << ',' << fmt(num.abs_error / std::abs(c.value)) << '\n';
    }
  }
  prob.persist();
  rot.persist();
  return 0;
}

int cmd_multiplier(const JobSpec& s) {
  const std::size_t m = s.grid == 0 ? 1000 : s.grid;
  Output out(s.out);
  auto& os = out.stream();
  // closed forms in terms of digamma / trigamma: the error column is a round-off bound
  constexpr double kRound = 1e-14;
  os << "xi,hilbert,hdis,mtilde," << (s.pmult ? "pmult," : "") << "abs_err\n";
  for (std::size_t j = 0; j <= m; ++j) {
    const double xi = 0.5 * static_cast<double>(j) / static_cast<double>(m);
    os << fmt(xi) << ",1," << fmt(hdis_multiplier(xi)) << ',' << fmt(multiplier_Mtilde(xi)) << ',';
    if (s.pmult) os << fmt(pkernel_multiplier(xi)) << ',';
    os << fmt(kRound) << '\n';
  }
  return 0;
}

int cmd_pkernel(const JobSpec& s) {
  const std::size_t N = s.grid == 0 ? (1u << 16) : s.grid;
  const PKernel P = pkernel_coefficients(N);
  double sum = 0.0, minc = std::numeric_limits<double>::infinity();
  for (const auto& [n, v] : P.coeffs.support()) {
    sum += v;
    minc = std::min(minc, v);
  }
  json j;
  j["command"] = "pkernel";
  j["grid"] = N;
  j["sum"] = sum;
  // the sum over all N coefficients is the sample at xi = 0, exact up to round-off
  j["sum_abs_err"] = static_cast<double>(N) * std::numeric_limits<double>::epsilon();
  j["min_coeff"] = minc;
  j["max_imag"] = P.max_imag;
  j["tail_mass"] = P.tail_mass;
  // aliasing: each coefficient picks up P(n + jN), j != 0, of the order of P near N/2
  const double alias = 2.0 * std::abs(P.coeffs(LatticePoint{-static_cast<int>(N / 2)})) + P.max_imag;
  json coeffs = json::array();
  for (int n = -10; n <= 10; ++n) coeffs.push_back({{"n", n}, {"value", P.coeffs(LatticePoint{n})}, {"abs_err", alias}});
  j["coefficients"] = coeffs;
  if (s.radius > 0) {
    const FactorizationReport f = convolution_factorization_check(s.radius, N);
    j["factorization"] = {{"radius", f.radius}, {"max_deviation", f.max_deviation}};
  }
  Output out(s.out);
  out.stream() << j.dump(2) << '\n';
  return 0;
}

int cmd_norms(const JobSpec& s) {
  const KernelKind kind = parse_kind(s.kind, s.k);
  validate_dk(s, kind);
  if (s.box < 2) throw UsageError("--box must be >= 2");
  KernelTable table(kind, s.d, quad(s));
  json j;
  j["command"] = "norms";
  j["kernel"] = kind.name();
  j["d"] = s.d;
  j["box"] = s.box;
  j["budget"] = s.budget;
  j["seed"] = s.seed;
  j["rtol"] = s.rtol;
  j["atol"] = s.atol;
  json res = json::array();
  for (double p : s.p) {
    const double bound = cot_bound(p);
    const NormSearchResult r = norm_lower_bound_search(table, p, s.box, s.budget, s.seed);
    double kerr = 0.0;
    for (const auto& n : box_points(s.d, s.box - 1, true)) kerr += table.get(n).abs_error;
    res.push_back({{"p", p},
                   {"ratio", r.best_ratio},
                   // |ratio error| <= sum of kernel errors over the section (Young's inequality)
                   {"abs_err", kerr},
                   {"cot_bound", bound},
                   {"iterations", r.iterations}});
  }
  j["results"] = res;
  Output out(s.out);
  out.stream() << j.dump(2) << '\n';
  return 0;
}

int cmd_mc(const JobSpec& s) {
  if (s.d < 1 || s.d > 3) throw UsageError("--d must be 1, 2 or 3");
  SdeConfig cfg;
  cfg.paths = s.paths;
  cfg.seed = s.seed;
  cfg.jobs = s.jobs;
  cfg.w_start = s.w;
  json j;
  j["command"] = "mc";
  j["mode"] = s.mode;
  j["d"] = s.d;
  j["w"] = s.w;
  j["paths"] = s.paths;
  j["seed"] = s.seed;
  j["dt_base"] = cfg.dt_base;
  j["boundary_factor"] = cfg.boundary_factor;
  j["y_floor"] = cfg.y_floor;
  j["exit_tol"] = cfg.exit_tol;
  if (s.mode == "exit") {
    const ExitDistribution dist = simulate_exit(cfg, s.d);
    const ChiSquareReport chi = exit_law_chi2(dist, s.d, s.w);
    j["capped"] = dist.capped;
    j["mean_steps"] = dist.mean_steps;
    j["chi2"] = {{"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}};
    const PeriodicPoissonEvaluator& ev = default_evaluator(s.d);
    const std::vector<double> origin(static_cast<std::size_t>(s.d), 0.0);
    const double h = ev.value(origin, s.w);
    const double N = static_cast<double>(dist.paths - dist.capped);
    json exits = json::array();
    for (const auto& [n, c] : dist.counts) {
      const double q = static_cast<double>(c) / N;
      exits.push_back({{"n", n.coords},
                       {"frequency", q},
                       {"abs_err", std::sqrt(q * (1.0 - q) / N)},
                       {"exact", poisson_p(origin, s.w, n.coords) / h}});
    }
    j["exits"] = exits;
  } else if (s.mode == "projection") {
    if (s.d > 2) throw UsageError("projection needs --d 1 or 2");
    if (static_cast<int>(s.exit_point.size()) != s.d) throw UsageError("--n needs d coordinates");
    if (s.k < 1 || s.k > s.d) throw UsageError("--k must be in 1..d");
    const LatticePoint n(s.exit_point);
    const ConstantMatrix A = hmatrix(s.k, s.d);
    const ProjectionEstimate e = estimate_projection(Sequence::delta(LatticePoint::zero(s.d)), A, cfg, n);
    const QuadResult q = finite_w_kernel(n, LatticePoint::zero(s.d), A, s.w, quad(s));
    j["n"] = n.coords;
    j["k"] = s.k;
    j["estimate"] = {{"value", e.value}, {"abs_err", e.stderr_}, {"hits", e.hits}, {"capped", e.capped}};
    j["quadrature"] = {{"value", q.value}, {"abs_err", q.abs_error}};
  } else {
    throw UsageError("--mode must be exit or projection");
  }
  Output out(s.out);
  out.stream() << j.dump(2) << '\n';
  return 0;
}

void common(CLI::App* c, JobSpec& s) {
  c->add_option("--out,-o", s.out, "output file (default stdout)");
  c->add_option("--rtol", s.rtol, "quadrature relative tolerance")->capture_default_str();
  c->add_option("--atol", s.atol, "quadrature absolute tolerance")->capture_default_str();
  c->add_option("--jobs,-j", s.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  JobSpec s;
  CLI::App app{"Kernels, multipliers and norm estimates for discrete singular integrals on Z^d.\n"
               "Kernel tables are cached as CSV in $DISCT_CACHE when set."};
  app.set_config("--config", "", "key = value file with any of the options below");
  app.require_subcommand(1);

  auto* kernel = app.add_subcommand("kernel", "kernel values on a box: n1..nd,value,abs_err");
  kernel->add_option("--kind", s.kind, "cz | prob | rot | hilbert-dis | prob-hilbert (default prob)");
  kernel->add_option("--d", s.d, "dimension 1..3 (default 2)");
  kernel->add_option("--k", s.k, "Riesz direction (1..d)")->capture_default_str();
  kernel->add_option("--radius", s.radius, "box [0, R]^d")->capture_default_str();
  kernel->add_flag("--full", s.full, "use [-R, R]^d instead");
  common(kernel, s);

  auto* table = app.add_subcommand("table", "d = 2, k = 1 tables: 1 kernels, 2 prob/cz, 3 rot/cz");
  table->add_option("--which", s.which, "1, 2 or 3")->capture_default_str();
  table->add_option("--radius", s.radius, "cells n1, n2 in 0..R")->capture_default_str();
  common(table, s);

  auto* mult = app.add_subcommand("multiplier", "d = 1 multipliers on [0, 1/2]: xi,hilbert,hdis,mtilde");
  mult->add_option("--grid", s.grid, "intervals (default 1000)");
  mult->add_flag("--pmult", s.pmult, "add the probability kernel multiplier column");
  mult->add_option("--out,-o", s.out, "output file (default stdout)");

  auto* pk = app.add_subcommand("pkernel", "probability kernel coefficients (JSON)");
  pk->add_option("--grid", s.grid, "DFT size, power of two >= 4096 (default 65536)");
  pk->add_option("--radius", s.radius, "factorization check radius, 0 to skip")->capture_default_str();
  pk->add_option("--out,-o", s.out, "output file (default stdout)");

  auto* norms = app.add_subcommand("norms", "finite-section l^p norm lower bounds (JSON)");
  norms->add_option("--kernel,--kind", s.kind, "kernel kind (default prob-hilbert)");
  norms->add_option("--d", s.d, "dimension (default 1)");
  norms->add_option("--k", s.k, "Riesz direction")->capture_default_str();
  norms->add_option("--p", s.p, "exponents")->capture_default_str();
  norms->add_option("--box", s.box, "section side")->capture_default_str();
  norms->add_option("--budget", s.budget, "iterations / restarts")->capture_default_str();
  norms->add_option("--seed", s.seed, "RNG seed")->capture_default_str();
  common(norms, s);

  auto* mc = app.add_subcommand("mc", "h-process Monte Carlo (JSON)");
  mc->add_option("--mode", s.mode, "exit (exit law chi^2) | projection (H^(k) projection kernel)")
      ->capture_default_str();
  mc->add_option("--d", s.d, "dimension (default 1)");
  mc->add_option("--k", s.k, "H^(k) for projection")->capture_default_str();
  mc->add_option("--w", s.w, "starting height")->capture_default_str();
  mc->add_option("--paths", s.paths, "paths")->capture_default_str();
  mc->add_option("--seed", s.seed, "RNG seed")->capture_default_str();
  mc->add_option("--n", s.exit_point, "exit point for projection")->capture_default_str();
  common(mc, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  s.command = app.get_subcommands().front()->get_name();
  const bool one_d = s.command == "norms" || s.command == "mc";
  if (s.d == 0) s.d = one_d ? 1 : 2;
  if (s.kind.empty()) s.kind = s.command == "norms" ? "prob-hilbert" : "prob";

  try {
    if (s.command == "kernel") return cmd_kernel(s);
    if (s.command == "table") return cmd_table(s);
    if (s.command == "multiplier") return cmd_multiplier(s);
    if (s.command == "pkernel") return cmd_pkernel(s);
    if (s.command == "norms") return cmd_norms(s);
    if (s.command == "mc") return cmd_mc(s);
  } catch (const UsageError& e) {
    std::cerr << json{{"error", "usage"}, {"reason", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "usage"}, {"reason", e.what()}}.dump() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << json{{"error", "domain"}, {"reason", e.what()}}.dump() << '\n';
    return 2;
  } catch (const QuadratureError& e) {
    std::cerr << json{{"error", "quadrature"}, {"reason", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "numerical"}, {"reason", e.what()}}.dump() << '\n';
    return 1;
  }
  return 2;
}
