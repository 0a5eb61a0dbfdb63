#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "disct/kernels.hpp"
#include "disct/numerics.hpp"
#include "disct/types.hpp"

namespace disct {

/// Lazily filled table of kernel values keyed by n, optionally persisted as CSV
/// (header d,kind,k,n1,...,nd,value,abs_err; rows sorted lexicographically by n).
/// Concurrent reads are safe; misses compute outside the lock and insert exclusively.
class KernelTable {
 public:
  KernelTable(KernelKind kind, int d, QuadConfig cfg = {});

  const KernelKind& kind() const { return kind_; }
  int dim() const { return d_; }
  QuadResult get(const LatticePoint& n);
  bool has(const LatticePoint& n) const;
  /// Fills every n with |n|_inf <= R, using up to `jobs` threads.
  void fill_box(int R, int jobs = 1);
  /// Fills the given points; the first failure is rethrown after the workers stop.
  void fill(const std::vector<LatticePoint>& pts, int jobs = 1);
  std::size_t size() const;

  /// Cache file for this table inside dir (empty when the kind is not cacheable).
  std::filesystem::path cache_file(const std::filesystem::path& dir) const;
  void load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

 private:
  KernelKind kind_;
  int d_;
  QuadConfig cfg_;
  mutable std::shared_mutex mu_;
  std::map<LatticePoint, QuadResult> values_;
};

/// Directory from DISCT_CACHE, empty if unset.
std::filesystem::path cache_directory();

struct ApplyResult {
  Sequence g{1};
  /// Sup-norm bound C ||f||_1 R^-d on every omitted term or output point,
  /// with C = max |l|^d |K(l)| measured over the table.
  double tail_bound = 0.0;
};

/// g(n) = sum over m in supp f with |n - m|_inf <= R of K(n - m) f(m), for n in supp f dilated by R.
ApplyResult apply_kernel(const Sequence& f, KernelTable& table, int R);
ApplyResult apply_kernel(const Sequence& f, const KernelKind& kind, int R, const QuadConfig& cfg = {});

double lp_norm(const Sequence& f, double p);
/// cot(pi / (2 p*)), p* = max(p, p/(p-1))
double cot_bound(double p);
double norm_ratio(const Sequence& f, KernelTable& table, double p, int R);
double norm_ratio(const Sequence& f, const KernelKind& kind, double p, int R, const QuadConfig& cfg = {});

struct NormSearchResult {
  double best_ratio = 0.0;
  Sequence witness{1};
  int iterations = 0;
};

/// Lower bound for the l^p norm of the kernel's operator restricted to the box
/// [0, box)^d (finite section). p = 2 uses power iteration, other p random restarts
/// plus greedy coordinate moves.
NormSearchResult norm_lower_bound_search(KernelTable& table, double p, int box, int budget,
                                         std::uint64_t seed = 1);

struct LittlewoodPaleyReport {
  double lhs = 0.0;
  double lhs_error = 0.0;
  double rhs = 0.0;  ///< (p* - 1) ||f||_p ||g||_q
  bool holds = false;
};

/// Integral of 2y h |grad u_f| |grad u_g| against (p* - 1) ||f||_p ||g||_q.
LittlewoodPaleyReport littlewood_paley_check(const Sequence& f, const Sequence& g, double p,
                                             const QuadConfig& cfg = {});

/// Exact d = 1 convolution with 1/(pi n), output on supp f dilated by R.
Sequence hdis_apply_reference(const Sequence& f, int R);

}  // namespace disct
