#pragma once

#include "cohere/basis.hpp"
#include "cohere/phantom.hpp"
#include "cohere/transform.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace cohere
{
/// Haar basis truncated to the n^d pixel grid on [-1, 1]^d (eps = 1/2).
struct ReconBasis
{
  int d = 2;
  long n = 256;
  int J = 0;
  Layout layout = Layout::separable;

  HaarGrid grid() const;
  BasisConfig config() const;
  std::size_t size() const { return grid().size(); }
  void validate() const;
};

/// Per-axis transform of the pixel indicator grid: int over cell m of exp(-2 pi i eps k x) dx
/// equals cell_factor(k) exp(-2 pi i eps k m h).
cplx cell_factor(double eps, long n, long k);

/// P_Omega U P_R applied matrix-free: Haar synthesis, FFT, gather.
class FourierOperator
{
public:
  FourierOperator(ReconBasis basis, std::vector<IntPoint> freqs);
  ~FourierOperator();
  FourierOperator(FourierOperator const&) = delete;
  FourierOperator& operator=(FourierOperator const&) = delete;

  Eigen::VectorXcd apply(Eigen::VectorXcd const& x) const;
  Eigen::VectorXcd adjoint(Eigen::VectorXcd const& y) const;

  Eigen::Index rows() const { return static_cast<Eigen::Index>(freqs_.size()); }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(basis_.size()); }
  ReconBasis const& basis() const { return basis_; }
  std::vector<IntPoint> const& frequencies() const { return freqs_; }

private:
  struct Plan;
  ReconBasis basis_;
  std::vector<IntPoint> freqs_;
  std::vector<std::size_t> gather_;
  std::vector<cplx> weight_;
  std::unique_ptr<Plan> plan_;
};

/// Explicit matrix with entries <element at offset c, chi_{freqs[r]}>.
Eigen::MatrixXcd dense_matrix(ReconBasis const& basis, std::vector<IntPoint> const& freqs);

/// <f, chi_n> for every frequency, from exact cell averages on an n_fine grid,
/// n_fine = oversample * base_n.
Eigen::VectorXcd simulate_measurements(ImageSource const& src, std::vector<IntPoint> const& freqs, double eps,
                                       long base_n, int oversample);

/// Pixel values of sum_c x_c (element c); the coefficient array is in the basis layout.
Raster synthesize(ReconBasis const& basis, Eigen::VectorXcd const& x, long resolution);

/// Haar coefficients of a raster (pixel values) at the basis resolution.
Eigen::VectorXcd analyze(ReconBasis const& basis, Raster const& image);

} // namespace cohere
