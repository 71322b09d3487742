#pragma once

#include "cohere/basis.hpp"

#include <vector>

namespace cohere
{
struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// L2-normalised Legendre polynomial sqrt(n - 1/2) P_{n-1}(x), n >= 1.
double legendre_normalized(long n, double x);

/// <p_n, chi_k> on [-1, 1] by adaptive Gauss-Legendre quadrature.
cplx legendre_fourier_coeff(LegendreIndex n, long k, double eps, double tol = 1e-10);

/// Spherical Bessel j_0..j_lmax at x >= 0 by normalised backward recurrence.
std::vector<double> spherical_bessel_sequence(double x, int lmax);

/// Smallest degree beyond which j_l(x) is negligible in double precision.
int bessel_cutoff(double x);

/// Same coefficient through 2 sqrt(eps) sqrt(n - 1/2) (-i)^{n-1} j_{n-1}(2 pi eps k).
cplx legendre_fourier_coeff_bessel(LegendreIndex n, long k, double eps);

/// sup_n |<p_n, chi_k>|^2.
double legendre_frequency_coherence(long k, double eps);

} // namespace cohere
