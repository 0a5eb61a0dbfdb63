#pragma once

#include <span>
#include <vector>

#include "disct/types.hpp"

namespace disct {

/// c_d = Gamma((d+1)/2) / pi^((d+1)/2)
double poisson_constant(int d);

/// p(x - n, y) = c_d y / (|x-n|^2 + y^2)^((d+1)/2)
double poisson_p(const HalfSpacePoint& pt, const LatticePoint& n);
double poisson_p(std::span<const double> x, double y, std::span<const int> n);

/// (d/dx_1, ..., d/dx_d, d/dy) of p(x - n, y)
std::vector<double> poisson_grad(const HalfSpacePoint& pt, const LatticePoint& n);
/// Writes the gradient into grad (size d+1) and returns p.
double poisson_value_grad(std::span<const double> x, double y, std::span<const int> n,
                          std::span<double> grad);

enum class HStrategy { Auto, Direct, Fourier, Constant, ClosedForm };

/// Evaluates h(x,y) = sum_n p(x - n, y). Immutable after construction.
class PeriodicPoissonEvaluator {
 public:
  explicit PeriodicPoissonEvaluator(int d, double y_direct_max = 0.25, double y_const_min = 10.0);

  int dim() const { return d_; }
  double y_direct_max() const { return y_direct_max_; }
  double y_const_min() const { return y_const_min_; }
  /// Window half-width of the direct lattice sum (per axis).
  int lattice_radius() const { return lattice_radius_; }
  /// Largest Fourier index used in the Fourier regime (attained at y = y_direct_max).
  int fourier_radius() const { return fourier_radius_; }

  double value(std::span<const double> x, double y, HStrategy s = HStrategy::Auto) const;
  /// Writes grad h (size d+1) and returns h.
  double value_grad(std::span<const double> x, double y, std::span<double> grad,
                    HStrategy s = HStrategy::Auto) const;

  /// sum_m |x - m|^-(d+1), the y -> 0 profile of h / (c_d y). x must be off the lattice.
  double boundary_sum(std::span<const double> x) const;

 private:
  HStrategy resolve(double y, HStrategy s) const;
  double direct(std::span<const double> x, double y, double* grad) const;
  double fourier(std::span<const double> x, double y, double* grad) const;
  double closed_form(double x, double y, double* grad) const;
  int fourier_terms(double y) const;

  int d_;
  double y_direct_max_;
  double y_const_min_;
  int lattice_radius_;
  int fourier_radius_;
};

double periodic_h(const HalfSpacePoint& pt, const PeriodicPoissonEvaluator& ev);
std::vector<double> periodic_h_grad(const HalfSpacePoint& pt, const PeriodicPoissonEvaluator& ev);

/// Green's function of the upper half-space with pole (0, w).
double green_w(const HalfSpacePoint& pt, double w);
double green_w(std::span<const double> x, double y, double w);

/// The envelope g(t) bounding G_w / p_n(0,w) <= 2y g(y/w).
double g_bound(double t, int d);

/// Boundary profile Psi: limit of p_0 / h as y -> 0.
double psi_boundary(std::span<const double> x, const PeriodicPoissonEvaluator& ev);
double psi_boundary(std::span<const double> x);

/// u_f(x,y) = sum_n f(n) p_n(x,y) / h(x,y)
double harmonic_extension(const Sequence& f, const HalfSpacePoint& pt,
                          const PeriodicPoissonEvaluator& ev);

}  // namespace disct
