#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "disct/kernels.hpp"
#include "disct/numerics.hpp"
#include "disct/poisson.hpp"

using namespace disct;

namespace {

constexpr double kPi = std::numbers::pi;

// d = 1: h = sinh(2 pi y) / (cosh(2 pi y) - cos(2 pi x))
double h1_closed(double x, double y) {
  return std::sinh(2 * kPi * y) / (std::cosh(2 * kPi * y) - std::cos(2 * kPi * x));
}

HalfSpacePoint random_point(std::mt19937_64& rng, int d, double ymin = 0.05, double ymax = 3.0) {
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(std::log(ymin), std::log(ymax));
  HalfSpacePoint pt;
  for (int i = 0; i < d; ++i) pt.x.push_back(ux(rng));
  pt.y = std::exp(uy(rng));
  return pt;
}

}  // namespace

TEST(PoissonP, Values) {
  EXPECT_NEAR(poisson_p(HalfSpacePoint{{0.0}, 1.0}, LatticePoint{0}), 1 / kPi, 1e-15);
  EXPECT_NEAR(poisson_p(HalfSpacePoint{{0.0, 0.0}, 1.0}, LatticePoint{0, 0}), 1 / (2 * kPi), 1e-15);
  EXPECT_NEAR(poisson_constant(3), 1 / (kPi * kPi), 1e-15);
}

TEST(PoissonP, UnitMass) {
  for (double y : {0.1, 1.0, 7.0}) {
    // d = 1 directly; d = 2 in polar form 2 pi int r p dr
    auto r1 = integrate_semiinf([y](double x) { return 2 * poisson_p(HalfSpacePoint{{x}, y}, LatticePoint{0}); });
    EXPECT_NEAR(r1.value, 1.0, 1e-9) << y;
    auto r2 = integrate_semiinf(
        [y](double r) { return 2 * kPi * r * poisson_p(HalfSpacePoint{{r, 0.0}, y}, LatticePoint{0, 0}); });
    EXPECT_NEAR(r2.value, 1.0, 1e-9) << y;
  }
}

TEST(PoissonGrad, SymmetryAndBound) {
  auto g = poisson_grad(HalfSpacePoint{{0.0}, 1.0}, LatticePoint{0});
  EXPECT_EQ(g[0], 0.0);
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 3; ++d)
    for (int i = 0; i < 50; ++i) {
      const auto pt = random_point(rng, d);
      const LatticePoint n = LatticePoint::zero(d);
      const auto gr = poisson_grad(pt, n);
      double norm = 0;
      for (double v : gr) norm += v * v;
      EXPECT_LE(std::sqrt(norm) / poisson_p(pt, n), d / pt.y * (1 + 1e-12));
    }
}

TEST(PoissonGrad, FiniteDifferences) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 3;
    auto pt = random_point(rng, d, 0.2, 2.0);
    const LatticePoint n = LatticePoint::zero(d);
    const auto g = poisson_grad(pt, n);
    const double eps = 1e-5;
    for (int j = 0; j <= d; ++j) {
      auto a = pt, b = pt;
      if (j < d) {
        a.x[j] += eps;
        b.x[j] -= eps;
      } else {
        a.y += eps;
        b.y -= eps;
      }
      const double fd = (poisson_p(a, n) - poisson_p(b, n)) / (2 * eps);
      EXPECT_NEAR(g[j], fd, 1e-6 * std::max(1.0, std::abs(g[j])));
    }
  }
}

TEST(PeriodicH, StrategiesAgree1d) {
  const PeriodicPoissonEvaluator ev(1);
  const double x[] = {0.3};
  const double ref = h1_closed(0.3, 0.7);
  for (auto s : {HStrategy::Direct, HStrategy::Fourier, HStrategy::ClosedForm, HStrategy::Auto})
    EXPECT_NEAR(ev.value(x, 0.7, s), ref, 1e-10);
}

TEST(PeriodicH, StrategiesAgreeAcrossSwitch) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d = 1; d <= 2; ++d) {
    const PeriodicPoissonEvaluator ev(d);
    for (double y : {0.15, 0.2, 0.25, 0.3, 0.4}) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& v : x) v = u(rng);
      const double a = ev.value(x, y, HStrategy::Direct), b = ev.value(x, y, HStrategy::Fourier);
      EXPECT_NEAR(a, b, 1e-8 * b) << d << ' ' << y;
    }
  }
}

TEST(PeriodicH, PeriodicAndFlat) {
  for (int d = 1; d <= 3; ++d) {
    const PeriodicPoissonEvaluator ev(d);
    std::vector<double> x(static_cast<std::size_t>(d), 0.37), xs = x;
    xs[0] += 3.0;
    for (double y : {0.05, 0.3, 2.0}) EXPECT_NEAR(ev.value(x, y), ev.value(xs, y), 1e-10 * ev.value(x, y));
    EXPECT_NEAR(ev.value(x, 20.0), 1.0, 1e-10);
  }
}

TEST(PeriodicH, DominatesSingleTermAndBoundedBelow) {
  std::mt19937_64 rng(5);
  for (int d = 1; d <= 3; ++d) {
    const PeriodicPoissonEvaluator ev(d);
    double cmin = 1e300;
    for (int i = 0; i < 40; ++i) {
      const auto pt = random_point(rng, d, 0.01, 5.0);
      const double h = periodic_h(pt, ev);
      EXPECT_GE(h, poisson_p(pt, LatticePoint::zero(d)));
      cmin = std::min(cmin, h / std::min(1.0, pt.y));
    }
    EXPECT_GT(cmin, 0.1) << d;
  }
}

TEST(PeriodicHGrad, ClosedFormDerivative1d) {
  const PeriodicPoissonEvaluator ev(1);
  for (double x : {0.0, 0.1, 0.3, 0.45})
    for (double y : {0.05, 0.2, 0.7, 3.0}) {
      const double c = std::cosh(2 * kPi * y) - std::cos(2 * kPi * x);
      const double hx = -std::sinh(2 * kPi * y) * 2 * kPi * std::sin(2 * kPi * x) / (c * c);
      const double hy = 2 * kPi * (std::cosh(2 * kPi * y) * c - std::pow(std::sinh(2 * kPi * y), 2)) / (c * c);
      for (auto s : {HStrategy::Direct, HStrategy::Fourier, HStrategy::Auto}) {
        if (s == HStrategy::Direct && y > 1.0) continue;
        double g[2];
        const double xs[] = {x};
        ev.value_grad(xs, y, g, s);
        EXPECT_NEAR(g[0], hx, 1e-8 * std::max(1.0, std::abs(hx)));
        EXPECT_NEAR(g[1], hy, 1e-8 * std::max(1.0, std::abs(hy)));
      }
    }
}

TEST(PeriodicHGrad, DriftBoundAndSymmetry) {
  std::mt19937_64 rng(13);
  for (int d = 1; d <= 3; ++d) {
    const PeriodicPoissonEvaluator& ev = default_evaluator(d);
    for (int i = 0; i < 50; ++i) {
      const auto pt = random_point(rng, d, 0.01, 4.0);
      const auto g = periodic_h_grad(pt, ev);
      const double h = periodic_h(pt, ev);
      double norm = 0;
      for (double v : g) norm += v * v;
      EXPECT_LE(std::sqrt(norm) / h, d / pt.y * (1 + 1e-9));
    }
    HalfSpacePoint o{std::vector<double>(static_cast<std::size_t>(d), 0.0), 0.6};
    EXPECT_NEAR(periodic_h_grad(o, ev)[0], 0.0, 1e-12);
  }
}

TEST(GreenW, PositiveAndLimit) {
  std::mt19937_64 rng(17);
  for (int d = 1; d <= 3; ++d) {
    for (int i = 0; i < 30; ++i) {
      const auto pt = random_point(rng, d);
      EXPECT_GT(green_w(pt, 2.0), 0.0);
    }
    const LatticePoint n = LatticePoint::zero(d);
    const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
    HalfSpacePoint pt{std::vector<double>(static_cast<std::size_t>(d), 0.4), 0.8};
    double prev = 1e300;
    for (double w : {10.0, 100.0, 1000.0}) {
      const double ratio = green_w(pt, w) / poisson_p(origin, w, n.coords);
      const double err = std::abs(ratio - 2 * pt.y);
      EXPECT_LT(err, prev);
      prev = err;
    }
    EXPECT_LT(prev, 1e-3);
  }
}

TEST(GreenW, Envelope) {
  std::mt19937_64 rng(19);
  for (int d = 1; d <= 3; ++d)
    for (int i = 0; i < 100; ++i) {
      const auto pt = random_point(rng, d, 0.01, 20.0);
      const double w = 5.0;
      if (std::abs(pt.y / w - 1.0) < 1e-3) continue;
      const std::vector<int> n(static_cast<std::size_t>(d), 1);
      const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
      const double lhs = green_w(pt, w) / poisson_p(origin, w, n);
      EXPECT_LE(lhs, 2 * pt.y * g_bound(pt.y / w, d) * (1 + 1e-12));
    }
  EXPECT_THROW(green_w(HalfSpacePoint{{0.0}, 2.0}, 2.0), DomainError);
}

TEST(GBound, Values) {
  EXPECT_NEAR(g_bound(0.0, 2), std::pow(2.0, 1.5), 1e-14);
  EXPECT_NEAR(g_bound(0.5, 1), std::log(9.0), 1e-14);
  double prev = 0;
  for (double t : {0.5, 0.9, 0.99, 0.999}) {
    EXPECT_GT(g_bound(t, 2), prev);
    prev = g_bound(t, 2);
  }
}

TEST(Psi, Values) {
  const double half[] = {0.5};
  EXPECT_NEAR(psi_boundary(half), 4 / (kPi * kPi), 1e-15);
  for (int d = 1; d <= 2; ++d) {
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    EXPECT_EQ(psi_boundary(x), 1.0);
    x[0] = 2.0;
    EXPECT_EQ(psi_boundary(x), 0.0);
  }
}

TEST(Psi, PartitionBound) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d = 1; d <= 2; ++d) {
    const PeriodicPoissonEvaluator& ev = default_evaluator(d);
    for (int i = 0; i < 10; ++i) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& v : x) v = u(rng);
      double s = 0;
      const int R = d == 1 ? 20000 : 60;
      std::vector<int> c(static_cast<std::size_t>(d), -R);
      while (true) {
        std::vector<double> z(x);
        for (int j = 0; j < d; ++j) z[j] -= c[static_cast<std::size_t>(j)];
        s += psi_boundary(z, ev);
        int j = d - 1;
        while (j >= 0 && ++c[static_cast<std::size_t>(j)] > R) c[static_cast<std::size_t>(j--)] = -R;
        if (j < 0) break;
      }
      EXPECT_LE(s, 1.0 + 1e-8);
      EXPECT_GT(s, 0.9);
    }
  }
}

TEST(HarmonicExtension, DeltaAndConstant) {
  const PeriodicPoissonEvaluator& ev = default_evaluator(1);
  HalfSpacePoint pt{{0.3}, 0.4};
  const double u = harmonic_extension(Sequence::delta(LatticePoint{0}), pt, ev);
  EXPECT_GT(u, 0.0);
  EXPECT_LE(u, 1.0);
  EXPECT_NEAR(u, poisson_p(pt, LatticePoint{0}) / periodic_h(pt, ev), 1e-15);
  Sequence one(1);
  for (int n = -200000; n <= 200000; ++n) one.set(LatticePoint{n}, 1.0);
  EXPECT_NEAR(harmonic_extension(one, pt, ev), 1.0, 1e-5);
}

TEST(HarmonicExtension, BoundaryLimitIsPsiInterpolation) {
  for (int d = 1; d <= 2; ++d) {
    const PeriodicPoissonEvaluator& ev = default_evaluator(d);
    Sequence f(d);
    f.set(LatticePoint::zero(d), 1.0);
    LatticePoint e = LatticePoint::zero(d);
    e[0] = 1;
    f.set(e, -0.5);
    std::vector<double> x(static_cast<std::size_t>(d), 0.3);
    HalfSpacePoint pt{x, 1e-4};
    std::vector<double> x1(x);
    x1[0] -= 1.0;
    const double ext = psi_boundary(x, ev) - 0.5 * psi_boundary(x1, ev);
    EXPECT_NEAR(harmonic_extension(f, pt, ev), ext, 1e-3) << d;
  }
}
