#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace disct {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evals = 0;
};

struct QuadConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::size_t max_subdivisions = 1'000'000;

  double target(double value) const;
};

/// Thrown when an adaptive rule runs out of subdivisions; carries the best estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadResult best);
  const QuadResult& best() const noexcept { return best_; }

 private:
  QuadResult best_;
};

enum class Decay { Algebraic, Exponential };

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(std::span<const double>)>;
using HalfspaceFn = std::function<double(std::span<const double> x, double y)>;

/// Globally adaptive 21-point Gauss-Kronrod on [a, b].
QuadResult integrate_1d(const Fn1& f, double a, double b, const QuadConfig& cfg = {});

/// Integral over (0, inf). Algebraic: y = t/(1-t). Exponential: y = -ln(1-t).
QuadResult integrate_semiinf(const Fn1& f, const QuadConfig& cfg = {},
                             Decay decay = Decay::Algebraic);

/// One box of a multi-region cubature, with its own integrand.
struct CubatureRegion {
  const FnN* f = nullptr;
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Globally adaptive Genz-Malik cubature over a union of boxes (dimension >= 2),
/// sharing one error budget. Dimension 1 falls back to integrate_1d.
QuadResult integrate_regions(std::span<const CubatureRegion> regions, const QuadConfig& cfg = {});

QuadResult integrate_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                         const QuadConfig& cfg = {}, int initial_splits = 1);

/// A point of the closed half-space around which the integrand is singular or kinked.
/// y = 0 gives a half-ball on the boundary, y > 0 a full ball.
struct HalfspaceCenter {
  std::vector<double> x;
  double y = 0.0;
  double radius = 0.5;
};

struct HalfspaceOptions {
  std::vector<HalfspaceCenter> centers;
  std::vector<double> x_origin;  ///< centre of the x-map, defaults to 0
  double x_scale = 1.0;          ///< x = origin + x_scale * t / (1 - t^2)
  double y_scale = 1.0;          ///< y = y_scale * s / (1 - s)
  int initial_splits = 4;
};

/// Integral over R^d x (0, inf). Balls around the centers are integrated in polar
/// coordinates, the rest in mapped Cartesian coordinates, glued by a smooth
/// partition of unity.
QuadResult integrate_halfspace(const HalfspaceFn& f, int d, const QuadConfig& cfg = {},
                               const HalfspaceOptions& opt = {});

double digamma(double x);
double trigamma(double x);

}  // namespace disct
