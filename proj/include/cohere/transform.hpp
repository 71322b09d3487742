#pragma once

#include "cohere/basis.hpp"

#include <complex>
#include <vector>

namespace cohere
{
enum class Layout
{
  separable, // Mallat square layout: one scale per element
  tensor     // full 1-D decomposition along every axis
};

/// Orthonormal Haar transform on n^d arrays (axis 0 fastest).
/// `coarse` is the per-axis count of scaling coefficients kept (2^{J+1} on [-1, 1]).
struct HaarGrid
{
  int d = 2;
  long n = 256;
  long coarse = 2;
  Layout layout = Layout::separable;

  std::size_t size() const;
  void validate() const;
};

void haar_analyze(HaarGrid const& g, std::vector<cplx>& data);
void haar_synthesize(HaarGrid const& g, std::vector<cplx>& data);
void haar_analyze(HaarGrid const& g, std::vector<double>& data);
void haar_synthesize(HaarGrid const& g, std::vector<double>& data);

/// Array offset of a basis element in the coefficient layout.
std::size_t coefficient_offset(HaarGrid const& g, SeparableWaveletIndex const& w);
std::size_t coefficient_offset(HaarGrid const& g, TensorWaveletIndex const& w);

/// Basis element stored at an array offset.
SeparableWaveletIndex separable_at(HaarGrid const& g, int J, std::size_t offset);
TensorWaveletIndex tensor_at(HaarGrid const& g, int J, std::size_t offset);

} // namespace cohere
