#include "disct/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace disct {

double QuadConfig::target(double value) const {
  return std::max(abs_tol, rel_tol * std::abs(value));
}

QuadratureError::QuadratureError(const std::string& what, QuadResult best)
    : std::runtime_error(what), best_(best) {}

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208624239400, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

double checked(const Fn1& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "integrand not finite at x = " << x;
    throw std::domain_error(os.str());
  }
  return v;
}

Interval gk21(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = checked(f, c);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    f1[j] = checked(f, c - dx);
    f2[j] = checked(f, c + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  resk *= h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs((resk - resg * h));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  return {a, b, resk, err};
}

}  // namespace

QuadResult integrate_1d(const Fn1& f, double a, double b, const QuadConfig& cfg) {
  if (!(a < b)) throw std::invalid_argument("integrate_1d: need a < b");
  std::priority_queue<Interval> heap;
  heap.push(gk21(f, a, b));
  std::size_t evals = 21;
  double value = heap.top().value;
  double error = heap.top().error;
  std::size_t splits = 0;
  // Intervals too small to split further are parked here.
  double frozen_value = 0.0, frozen_error = 0.0;
  while (error + frozen_error > cfg.target(value + frozen_value)) {
    if (heap.empty() || splits >= cfg.max_subdivisions) {
      QuadResult best{value + frozen_value, error + frozen_error, evals};
      std::ostringstream os;
      os << "integrate_1d: no convergence on [" << a << ", " << b << "], estimate "
         << best.value << " +- " << best.abs_error;
      throw QuadratureError(os.str(), best);
    }
    const Interval top = heap.top();
    heap.pop();
    const double mid = 0.5 * (top.a + top.b);
    if (!(top.a < mid && mid < top.b) || (top.b - top.a) < 1e-14 * (std::abs(a) + std::abs(b))) {
      frozen_value += top.value;
      frozen_error += top.error;
      value -= top.value;
      error -= top.error;
      continue;
    }
    const Interval l = gk21(f, top.a, mid);
    const Interval r = gk21(f, mid, top.b);
    evals += 42;
    ++splits;
    value += l.value + r.value - top.value;
    error += l.error + r.error - top.error;
    heap.push(l);
    heap.push(r);

  }
  return {value + frozen_value, error + frozen_error, evals};
}

QuadResult integrate_semiinf(const Fn1& f, const QuadConfig& cfg, Decay decay) {
  if (decay == Decay::Algebraic) {
    return integrate_1d(
        [&f](double t) {
          const double s = 1.0 - t;
          return f(t / s) / (s * s);
        },
        0.0, 1.0, cfg);
  }
  return integrate_1d(
      [&f](double t) {
        const double s = 1.0 - t;
        return f(-std::log1p(-t)) / s;
      },
      0.0, 1.0, cfg);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: x must be positive");
  return boost::math::digamma(x);
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma: x must be positive");
  return boost::math::trigamma(x);
}

}  // namespace disct
