#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cohere
{
using cplx = std::complex<double>;

/// Daubechies family with p vanishing moments.
///
/// `h` holds the 2p low-pass coefficients for the scaling function supported
/// on [-p+1, p], i.e. h[i] multiplies phi(2x - (i - p + 1)). The filter is
/// normalised so that sum(h) = sqrt(2).
struct WaveletFamily
{
  int p = 1;
  std::vector<double> h;

  int support_length() const { return 2 * p - 1; }
  int first_shift() const { return -p + 1; }
  bool is_haar() const { return p == 1; }
};

/// Truncation control for the infinite product defining F phi.
struct FtEvalConfig
{
  double product_tolerance = 1e-13;
  int max_product_terms = 200;

  void validate() const;
};

WaveletFamily build_family(int p);

/// Low-pass symbol m0(xi) = 2^{-1/2} sum_k h_k exp(-2 pi i k xi).
cplx lowpass_symbol(WaveletFamily const& fam, double xi);
/// High-pass symbol built from g_k = (-1)^k h_{1-k}.
cplx highpass_symbol(WaveletFamily const& fam, double xi);

/// F phi(omega) with F f(w) = int f(x) exp(-2 pi i w x) dx. Closed form for Haar.
cplx ft_scaling(WaveletFamily const& fam, double omega, FtEvalConfig const& cfg = {});
/// F psi(omega) = m1(omega/2) F phi(omega/2).
cplx ft_wavelet(WaveletFamily const& fam, double omega, FtEvalConfig const& cfg = {});

/// Always evaluates the truncated product, including for Haar.
cplx ft_scaling_product(WaveletFamily const& fam, double omega, FtEvalConfig const& cfg = {});
cplx ft_wavelet_product(WaveletFamily const& fam, double omega, FtEvalConfig const& cfg = {});

/// |F phi^s(omega)|^2 with s = 0 (scaling) or 1 (wavelet).
double ft_power(WaveletFamily const& fam, int s, double omega, FtEvalConfig const& cfg = {});

struct DecayCheck
{
  double constant = 0.0;  // sup over grid of |F phi(w)| |w|^alpha
  double lower_half = 0.0; // same sup over the lower half of the (sorted) grid
  bool plateau = false;   // constant <= 1.5 * lower_half
};

/// Smallest K with |F phi(w)| <= K |w|^{-alpha} on the grid.
DecayCheck check_decay(WaveletFamily const& fam, double alpha, std::span<double const> grid,
                       FtEvalConfig const& cfg = {});
/// Same for F psi.
DecayCheck check_decay_wavelet(WaveletFamily const& fam, double alpha,
                               std::span<double const> grid, FtEvalConfig const& cfg = {});

/// inf over [2^{-(q+1)}, 2^{-q}] of |F psi|, on a uniform grid.
double band_infimum(WaveletFamily const& fam, int q, int grid_points = 4096,
                    FtEvalConfig const& cfg = {});

/// Logarithmically spaced grid on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points);

} // namespace cohere
