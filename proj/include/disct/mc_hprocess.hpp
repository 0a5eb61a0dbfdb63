#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "disct/kernels.hpp"
#include "disct/types.hpp"

namespace disct {

struct SdeConfig {
  double dt_base = 0.0025;   ///< step for y <= 1; dt = min(dt_base * max(1, y^2), boundary_factor * y^2)
  double boundary_factor = 0.02; ///< dt <= boundary_factor * y^2 near the boundary
  double y_floor = 1e-3;    ///< absorption needs y <= y_floor ...
  double exit_tol = 1e-3;   ///< ... and p_n / h >= 1 - exit_tol at the nearest lattice point n
  double w_start = 2.0;     ///< start at (0, w)
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
  std::size_t max_steps = 1'000'000;  ///< per path
  int jobs = 1;
};

struct ExitDistribution {
  std::map<LatticePoint, std::size_t> counts;
  std::size_t paths = 0;
  std::size_t capped = 0;  ///< paths that hit max_steps (not in counts)
  double mean_steps = 0.0;
};

/// Euler-Maruyama for dZ = dB + grad h / h dt from (0, w_start).
ExitDistribution simulate_exit(const SdeConfig& cfg, int d);

struct ChiSquareReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/// Goodness of fit of an exit distribution against p_n(0,w) / h(0,w); bins with
/// expected count < 5 are pooled into one tail bin.
ChiSquareReport exit_law_chi2(const ExitDistribution& dist, int d, double w);

struct ProjectionEstimate {
  double value = 0.0;   ///< E[(A * M^f)_tau | exit = n]
  double stderr_ = 0.0;
  std::size_t hits = 0;
  double m0 = 0.0;              ///< u_f(0, w)
  double terminal_mean = 0.0;   ///< E[M_0 + sum grad u . dB | exit = n], should match f(n)
  double terminal_stderr = 0.0;
  double unconditioned_mean = 0.0;  ///< E[(A * M^f)_tau], zero for a martingale
  double unconditioned_stderr = 0.0;
  std::size_t capped = 0;
};

/// Monte Carlo estimate of T^w_A f(n) (d = 1 or 2). Throws if fewer than 100 paths exit at n.
ProjectionEstimate estimate_projection(const Sequence& f, const ConstantMatrix& A, const SdeConfig& cfg,
                                       const LatticePoint& n);

/// grad h / h at (x, y)
std::vector<double> drift_field(const HalfSpacePoint& pt);

}  // namespace disct
