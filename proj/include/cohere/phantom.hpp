#pragma once

#include <span>
#include <variant>
#include <vector>

namespace cohere
{
/// Values on n^d square pixels covering [-1, 1]^d, axis 0 fastest.
struct Raster
{
  int d = 2;
  long n = 0;
  std::vector<double> v;

  static Raster zeros(int d, long n);
  std::size_t size() const { return v.size(); }
  double pixel_width() const { return 2.0 / static_cast<double>(n); }
};

struct LorentzianPeak
{
  std::vector<double> p;
  std::vector<double> s;
  double amplitude = 1.0;
};

/// Sum of products of 1-D Lorentzians s / (s^2 + (x - p)^2).
struct LorentzianSpectrum
{
  int d = 2;
  std::vector<LorentzianPeak> peaks;

  void validate() const;
};

double lorentzian(double p, double s, double x);
double eval_spectrum(LorentzianSpectrum const& model, std::span<double const> x);

struct Box
{
  std::vector<double> lo;
  std::vector<double> hi;
  double value = 1.0;
};

/// Alternating cells of side `cell` inside [origin, origin + size]; even cells get `contrast`.
struct Checkerboard
{
  std::vector<double> origin;
  std::vector<double> size;
  double cell = 1.0 / 64.0;
  double contrast = 1.0;
};

struct BlockPhantom
{
  int d = 2;
  std::vector<Box> boxes;
  std::vector<Checkerboard> checkers;

  void validate() const;
  /// Boxes plus one box per lit checkerboard cell.
  std::vector<Box> flatten() const;
};

using ImageSource = std::variant<LorentzianSpectrum, BlockPhantom, Raster>;

int source_dim(ImageSource const& src);

/// Exact mean of the source over each of n^d pixels.
Raster cell_average(ImageSource const& src, long n);

/// Sum |a - b| / sum |b|.
double l1_error(Raster const& recon, Raster const& reference);

/// Pearson correlation of a and b restricted to the pixels inside [lo, hi].
double patch_correlation(Raster const& a, Raster const& b, std::span<double const> lo, std::span<double const> hi);

} // namespace cohere
