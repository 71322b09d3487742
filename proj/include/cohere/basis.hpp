#pragma once

#include "cohere/wavelet.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace cohere
{
constexpr int max_dim = 5;

/// Integer lattice point in Z^d, d <= max_dim.
struct IntPoint
{
  std::array<long, max_dim> c{};
  int d = 1;

  IntPoint() = default;
  IntPoint(std::initializer_list<long> v);
  static IntPoint zeros(int d);

  long& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  long operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(IntPoint const& a, IntPoint const& b);
  friend std::strong_ordering operator<=>(IntPoint const& a, IntPoint const& b);

  long max_abs() const;
  std::string str() const;
};

struct IntPointHash
{
  std::size_t operator()(IntPoint const& p) const noexcept;
};

using FourierIndex = IntPoint;

struct BasisConfig
{
  int d = 1;
  WaveletFamily fam = build_family(1);
  int J = 0;
  double eps = 0.5;
  /// Upper bound on the number of basis elements any enumeration may produce.
  long long budget = 50'000'000;
  FtEvalConfig ft;

  /// Largest admissible Fourier spacing for (J, p).
  static double max_eps(int J, int p);
  void validate() const;
};

/// Psi^s_{j,k}: s is a bit mask (bit i set -> wavelet on axis i); one scale j.
struct SeparableWaveletIndex
{
  unsigned s = 0;
  int j = 0;
  IntPoint k;

  friend bool operator==(SeparableWaveletIndex const&, SeparableWaveletIndex const&) = default;
};

/// Tensor product element: independent scale per axis.
struct TensorWaveletIndex
{
  unsigned s = 0;
  std::array<int, max_dim> j{};
  IntPoint k;

  int scale_sum() const;
  friend bool operator==(TensorWaveletIndex const&, TensorWaveletIndex const&) = default;
};

struct LegendreIndex
{
  long n = 1;
};

/// Translations k with supp(phi_{j,k}) meeting (-1, 1) in a set of positive measure.
struct TranslationRange
{
  long lo = 0;
  long hi = 0;
  long count() const { return hi - lo + 1; }
};
TranslationRange translation_range(int p, int j);

/// Number of separable elements at level j (all types s present at j).
long long separable_level_size(BasisConfig const& cfg, int j);

std::vector<SeparableWaveletIndex> enumerate_separable_level(BasisConfig const& cfg, int j);

bool is_valid(BasisConfig const& cfg, SeparableWaveletIndex const& w);
bool is_valid(BasisConfig const& cfg, TensorWaveletIndex const& w);

/// F of phi^s_{j,k} (one axis) at omega.
cplx ft_dilated(BasisConfig const& cfg, int s, int j, long k, double omega);

/// <Psi^s_{j,k}, chi_n> = eps^{d/2} F Psi^s_{j,k}(eps n).
cplx inner_product_sep(BasisConfig const& cfg, SeparableWaveletIndex const& w, FourierIndex const& f);
cplx inner_product_tensor(BasisConfig const& cfg, TensorWaveletIndex const& w, FourierIndex const& f);

} // namespace cohere
