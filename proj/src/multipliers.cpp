#include "disct/multipliers.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "disct/kernels.hpp"

namespace disct {

namespace {

constexpr double kPi = std::numbers::pi;

// reduce to [-1/2, 1/2)
double fold(double xi) { return xi - std::floor(xi + 0.5); }

// Richardson on u(1/2 - 2^-j), j = 6..10
double u_at_half() {
  static const double value = [] {
    constexpr int levels = 5;
    double T[levels][levels];
    for (int j = 0; j < levels; ++j) {
      const double h = std::ldexp(1.0, -(6 + j));
      T[j][0] = u_function(0.5 - h);
      for (int i = 1; i <= j; ++i) {
        const double f = std::ldexp(1.0, i);
        T[j][i] = T[j][i - 1] + (T[j][i - 1] - T[j - 1][i - 1]) / (f - 1.0);
      }
    }
    return T[levels - 1][levels - 1];
  }();
  return value;
}

}  // namespace

double phi(double x) {
  if (std::abs(x) >= 1.0) throw DomainError("phi: need |x| < 1");
  return digamma(1.0 + x) + digamma(1.0 - x) - 2.0 * digamma(1.0);
}

double multiplier_M(double xi) {
  const double a = std::abs(xi);
  if (a >= 1.0) return 1.0 / a;
  return 1.0 + (1.0 - a) * 2.0 * (digamma(1.0 + a) - digamma(1.0)) +
         a * (1.0 - a) * (trigamma(1.0 + a) - trigamma(1.0));
}

double multiplier_Mtilde(double xi) {
  const double a = std::abs(fold(xi));
  if (a == 0.5) return 0.0;
  return 1.0 + (1.0 - 2.0 * a) * phi(a) + a * (1.0 - a) * (trigamma(1.0 + a) - trigamma(1.0 - a));
}

double hdis_multiplier(double xi) { return 1.0 - 2.0 * std::abs(fold(xi)); }

double u_function(double x) {
  if (x < 0.0 || x > 0.5) throw DomainError("u_function: need 0 <= x <= 1/2");
  if (x == 0.5) return u_at_half();
  return multiplier_Mtilde(x) / (1.0 - 2.0 * x) - 1.0;
}

double pkernel_multiplier(double xi) {
  const double a = std::abs(fold(xi));
  return 1.0 / (1.0 + u_function(a));
}

PKernel pkernel_coefficients(std::size_t N) {
  if (N < 4096 || (N & (N - 1)) != 0)
    throw std::invalid_argument("pkernel_coefficients: N must be a power of two >= 4096");
  // samples at xi_j = j/N (periodic), P(n) = (1/N) sum_j F(xi_j) e^{2 pi i n j / N}
  static std::mutex plan_mutex;  // FFTW planning is not thread-safe
  std::vector<fftw_complex> in(N), out(N);
  for (std::size_t j = 0; j < N; ++j) {
    in[j][0] = pkernel_multiplier(static_cast<double>(j) / static_cast<double>(N));
    in[j][1] = 0.0;
  }
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(N), in.data(), out.data(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  PKernel r;
  const long half = static_cast<long>(N / 2);
  for (std::size_t j = 0; j < N; ++j) {
    const long n = static_cast<long>(j) < half ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(N);
    const double re = out[j][0] / static_cast<double>(N);
    const double im = out[j][1] / static_cast<double>(N);
    r.max_imag = std::max(r.max_imag, std::abs(im));
    if (std::labs(n) > half / 2) r.tail_mass += re;
    r.coeffs.set(LatticePoint{static_cast<int>(n)}, re);
  }
  if (r.max_imag > 1e-10) throw NumericalError("pkernel_coefficients: imaginary residue too large");
  return r;
}

double th_multiplier_partial_sum(double xi, int n_terms) {
  double s = 0.0;
  for (int n = 1; n <= n_terms; ++n) s += prob_hilbert_kernel_1d(n) * std::sin(2.0 * kPi * n * xi);
  return 2.0 * s;
}

MultiplierSamples th_multiplier_from_kernel(int n_terms, std::size_t m) {
  if (n_terms < 1 || m < 1) throw std::invalid_argument("th_multiplier_from_kernel: bad sizes");
  std::vector<double> K(static_cast<std::size_t>(n_terms) + 1, 0.0);
  for (int n = 1; n <= n_terms; ++n) K[static_cast<std::size_t>(n)] = prob_hilbert_kernel_1d(n);
  MultiplierSamples out;
  for (std::size_t j = 0; j < m; ++j) {
    const double xi = -0.5 + static_cast<double>(j) / static_cast<double>(m);
    double s = 0.0;
    for (int n = 1; n <= n_terms; ++n) s += K[static_cast<std::size_t>(n)] * std::sin(2.0 * kPi * n * xi);
    out.grid.push_back(xi);
    out.values.push_back(2.0 * s);
  }
  return out;
}

FactorizationReport convolution_factorization_check(int R, std::size_t N) {
  if (R < 1) throw std::invalid_argument("convolution_factorization_check: R must be positive");
  const PKernel P = pkernel_coefficients(N);
  constexpr int kOut = 10;
  std::vector<double> K(static_cast<std::size_t>(R + kOut) + 1, 0.0);
  for (int n = 1; n <= R + kOut; ++n) K[static_cast<std::size_t>(n)] = prob_hilbert_kernel_1d(n);
  auto kh = [&K](int n) { return n == 0 ? 0.0 : (n > 0 ? K[static_cast<std::size_t>(n)] : -K[static_cast<std::size_t>(-n)]); };
  FactorizationReport rep;
  rep.radius = R;
  for (int n = -kOut; n <= kOut; ++n) {
    double s = 0.0;
    for (int m = -R; m <= R; ++m) s += kh(n - m) * P.coeffs(LatticePoint{m});
    rep.convolved.push_back(s);
    const double target = n == 0 ? 0.0 : 1.0 / (kPi * n);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(s - target));
  }
  return rep;
}

}  // namespace disct
