#pragma once

#include <vector>

#include "disct/numerics.hpp"
#include "disct/types.hpp"

// d = 1 multipliers in symmetrized real form: the complex multiplier is -i sign(xi) g(xi).
namespace disct {

/// Equispaced samples on [-1/2, 1/2).
struct MultiplierSamples {
  std::vector<double> grid;
  std::vector<double> values;
  std::size_t size() const { return grid.size(); }
};

/// Multiplier of the probabilistic discrete Hilbert kernel viewed on R.
double multiplier_M(double xi);

/// phi(x) = psi(1+x) + psi(1-x) - 2 psi(1), |x| < 1.
double phi(double x);

/// Periodized multiplier on Q = [-1/2, 1/2); periodic outside.
double multiplier_Mtilde(double xi);

/// 1 - 2|xi| (periodic).
double hdis_multiplier(double xi);

/// u(x) = Mtilde(x) / (1 - 2x) - 1 on [0, 1/2); u(1/2) by extrapolation.
double u_function(double x);

/// (1 - 2|xi|) / Mtilde(xi), the multiplier of the probability kernel P.
double pkernel_multiplier(double xi);

struct PKernel {
  Sequence coeffs{1};        ///< P(n), -N/2 <= n < N/2
  double max_imag = 0.0;     ///< largest imaginary residue of the inverse DFT
  double tail_mass = 0.0;    ///< sum of P(n) over |n| > N/4
};

/// Inverse DFT of pkernel_multiplier sampled on N points (N a power of two, >= 2^12).
PKernel pkernel_coefficients(std::size_t N);

/// Partial Fourier sums g(xi) = 2 sum_{n=1}^{n_terms} K_H(n) sin(2 pi n xi) on a grid of size m.
MultiplierSamples th_multiplier_from_kernel(int n_terms, std::size_t m = 1024);
double th_multiplier_partial_sum(double xi, int n_terms);

struct FactorizationReport {
  int radius = 0;
  double max_deviation = 0.0;  ///< max over |n| <= 10 of |(K_H * P)(n) - 1/(pi n)|
  std::vector<double> convolved;  ///< (K_H * P)(n), n = -10..10
};

/// Truncated convolution of K_H with P against the discrete Hilbert kernel.
FactorizationReport convolution_factorization_check(int R, std::size_t N = 1u << 16);

}  // namespace disct
