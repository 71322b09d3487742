#pragma once

#include "cohere/basis.hpp"
#include "cohere/ordering.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cohere
{
enum class WaveletKind
{
  separable,
  tensor
};

struct CoherenceProfile
{
  std::vector<double> row;    // row[N-1] = mu at rank N
  std::vector<double> suffix; // sup over ranks >= N within the horizon
  long long horizon = 0;
  /// Upper bound on row values beyond the horizon.
  double tail_bound = 1.0;
  /// Ranks 1..certified have suffix values that dominate every rank past the horizon.
  long long certified = 0;
  std::string ordering;
  /// Wavelet-row profiles only: some sup sat on the edge of its frequency scan.
  bool boundary_attained = false;

  /// Fills suffix and certified from row and tail_bound.
  void finalize();
};

/// sup over the wavelet basis of |<g, chi_n>|^2.
double frequency_coherence(BasisConfig const& cfg, FourierIndex const& n, WaveletKind kind);

/// Same, by scanning scales J..jmax without early termination.
double frequency_coherence_bruteforce(BasisConfig const& cfg, FourierIndex const& n, WaveletKind kind,
                                      int jmax);

/// K with |F phi(w)|, |F psi(w)| <= K / |w|.
double decay_constant(WaveletFamily const& fam, FtEvalConfig const& ft = {});

/// Smallest H_d(n) over lattice points not in the prefix.
double min_hyperbolic_outside(std::vector<IntPoint> const& prefix);

CoherenceProfile row_profile(BasisConfig const& cfg, std::vector<IntPoint> const& prefix, WaveletKind kind,
                             int threads = 1);

/// Fourier-row profile for the Legendre basis (d = 1).
CoherenceProfile legendre_row_profile(double eps, std::vector<IntPoint> const& prefix, int threads = 1);

struct WaveletRowOptions
{
  double radius_multiplier = 64.0;
  bool strict = false;
};

/// mu(U pi_N): sup over frequencies in a box of radius multiplier * 2^j, per axis.
CoherenceProfile wavelet_row_profile(BasisConfig const& cfg, std::vector<SeparableWaveletIndex> const& prefix,
                                     WaveletRowOptions const& opt = {});
CoherenceProfile wavelet_row_profile(BasisConfig const& cfg, std::vector<TensorWaveletIndex> const& prefix,
                                     WaveletRowOptions const& opt = {});

struct LocalCoherenceMatrix
{
  std::vector<long long> levels_n;
  std::vector<long long> levels_m;
  Eigen::MatrixXd mu; // mu(k, l)
  /// mu(P_k U P_l) and mu(P_k U) per block.
  Eigen::MatrixXd block_sup;
  std::vector<double> row_sup;

  int rows() const { return static_cast<int>(mu.rows()); }
  int cols() const { return static_cast<int>(mu.cols()); }
};

/// Local coherences of an explicit matrix (rows = sampling ranks, cols = sparsity ranks).
LocalCoherenceMatrix local_coherence(Eigen::MatrixXcd const& U, std::vector<long long> const& levels_n,
                                     std::vector<long long> const& levels_m);

/// Local coherences of the Fourier/separable-wavelet pair.
LocalCoherenceMatrix local_coherence(BasisConfig const& cfg, std::vector<IntPoint> const& fourier,
                                     std::vector<long long> const& levels_n,
                                     std::vector<SeparableWaveletIndex> const& wavelets,
                                     std::vector<long long> const& levels_m);

struct DecayModel
{
  enum class Kind
  {
    pow,
    pow_log
  };
  Kind kind = Kind::pow;
  double alpha = 1.0;
  int d = 1;

  double operator()(double N) const;
};

struct DecayFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double band_ratio() const { return c2 / c1; }
};

/// Log-log slope of the suffix envelope over [lo, hi] and min/max of envelope/model there.
/// lo = 0 selects the default window starting past the first 10% of ranks.
DecayFit fit_decay(CoherenceProfile const& profile, DecayModel const& model, long long lo = 0, long long hi = 0);

} // namespace cohere
