#pragma once

#include <string>
#include <vector>

#include "disct/numerics.hpp"
#include "disct/poisson.hpp"
#include "disct/types.hpp"

namespace disct {

/// Real (d+1)x(d+1) matrix acting on gradients (d/dx_1, ..., d/dx_d, d/dy).
class ConstantMatrix {
 public:
  ConstantMatrix() = default;
  /// Row-major entries; size must be n*n.
  ConstantMatrix(int n, std::vector<double> entries);

  static ConstantMatrix identity(int n);
  static ConstantMatrix zero(int n);

  int size() const { return n_; }
  /// 0-based (i, j).
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  const std::vector<double>& entries() const { return a_; }
  /// Largest singular value.
  double op_norm() const { return norm_; }
  /// <Av, v> = 0 for all v, i.e. A + A^T = 0.
  bool is_orthogonal() const { return orthogonal_; }

  /// out = A v
  void apply(const double* v, double* out) const;

 private:
  int n_ = 0;
  std::vector<double> a_;
  double norm_ = 0.0;
  bool orthogonal_ = true;
};

/// H^(k): a_{k,d+1} = -1, a_{d+1,k} = 1 (1-based), zero elsewhere.
ConstantMatrix hmatrix(int k, int d);

enum class KernelTag { CzRiesz, ProbRiesz, Rotation, FiniteW, HilbertDis, ProbHilbert };

struct KernelKind {
  KernelTag tag = KernelTag::HilbertDis;
  int k = 1;
  ConstantMatrix A;  ///< FiniteW only
  double w = 0.0;    ///< FiniteW only

  static KernelKind cz_riesz(int k) { return {KernelTag::CzRiesz, k, {}, 0.0}; }
  static KernelKind prob_riesz(int k) { return {KernelTag::ProbRiesz, k, {}, 0.0}; }
  static KernelKind rotation(int k) { return {KernelTag::Rotation, k, {}, 0.0}; }
  static KernelKind finite_w(ConstantMatrix A, double w) { return {KernelTag::FiniteW, 1, std::move(A), w}; }
  static KernelKind hilbert_dis() { return {KernelTag::HilbertDis, 1, {}, 0.0}; }
  static KernelKind prob_hilbert() { return {KernelTag::ProbHilbert, 1, {}, 0.0}; }

  /// Short stable name: cz, prob, rot, finite-w, hilbert-dis, prob-hilbert.
  std::string name() const;
  /// Convolution kernels depend on n - m only; FiniteW does not.
  bool translation_invariant() const { return tag != KernelTag::FiniteW; }
};

/// Shared evaluator for dimension d (1..3), built once.
const PeriodicPoissonEvaluator& default_evaluator(int d);

/// c_d n_k / |n|^(d+1), 0 at n = 0. k is 1-based.
double cz_riesz_kernel(const LatticePoint& n, int k);

struct ProbIntegrands {
  double S = 0.0;
  double T = 0.0;
  double U = 0.0;
};

/// S_n, T_n and U_n = 4 S_n - 3 T_n at (x, y).
ProbIntegrands prob_integrands(const LatticePoint& n, int k, const HalfSpacePoint& pt);
ProbIntegrands prob_integrands(std::span<const double> z, int k, std::span<const double> x, double y);

/// Which of the three integrands to integrate, and whether to divide by h.
enum class ProbPart { S, T, U };
QuadResult prob_integral(const LatticePoint& n, int k, ProbPart part, bool divide_by_h,
                         const QuadConfig& cfg);

/// K_{H^(k)}(n) = integral of U_n / h over the half-space.
QuadResult prob_riesz_kernel(const LatticePoint& n, int k, const QuadConfig& cfg = {});

/// d = 1 closed form (1/(pi n)) (1 + int_0^inf 2y^3 / ((y^2 + pi^2 n^2) sinh^2 y) dy).
double prob_hilbert_kernel_1d(long n);

/// K^w_A(n, m): projection kernel with the pole of the Green's function at (0, w).
QuadResult finite_w_kernel(const LatticePoint& n, const LatticePoint& m, const ConstantMatrix& A,
                           double w, const QuadConfig& cfg = {});

/// w -> infinity limit: integral of 2y h A grad(p_m/h) . grad(p_n/h).
QuadResult limit_kernel(const LatticePoint& n, const LatticePoint& m, const ConstantMatrix& A,
                        const QuadConfig& cfg = {});

/// d = 2 method-of-rotations kernel, closed form. i is 1-based.
double rotation_kernel_2d(const LatticePoint& n, int i);

/// Method-of-rotations kernel for d >= 2 by quadrature.
QuadResult rotation_kernel(const LatticePoint& n, int k, const QuadConfig& cfg = {});

/// Continuous version of the d = 1 probabilistic kernel; throws at z = 0.
double continuous_prob_hilbert(double z);

/// ||J||_1 where J is the |z| >= 1 correction of continuous_prob_hilbert.
QuadResult j_tail_l1_norm(const QuadConfig& cfg = {});

/// 1 + (2/pi) int_0^inf y log(y^2/pi^2 + 1) / sinh^2 y dy
double fourier_bound_const();

/// Continuous version of K_{H^(k)} for d >= 2; throws at z = 0.
QuadResult continuous_prob_riesz(std::span<const double> z, int k, const QuadConfig& cfg = {});

/// Dispatch: kernel value at n (translation-invariant kinds) or at (n, 0) for FiniteW.
QuadResult kernel_value(const KernelKind& kind, const LatticePoint& n, const QuadConfig& cfg = {});

}  // namespace disct
