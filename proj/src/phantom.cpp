#include "cohere/phantom.hpp"

#include "cohere/basis.hpp"
#include "cohere/error.hpp"

#include <cmath>

namespace cohere
{
namespace
{
std::size_t pixel_count(int d, long n)
{
  std::size_t c = 1;
  for (int i = 0; i < d; ++i)
    c *= static_cast<std::size_t>(n);
  return c;
}

// Adds sum over terms of prod_i table[term][i][m_i] to out.
void add_separable(Raster& out, std::vector<std::vector<double>> const& axis_tables)
{
  int const d = out.d;
  long const n = out.n;
  if (d == 1)
  {
    for (long m = 0; m < n; ++m)
      out.v[static_cast<std::size_t>(m)] += axis_tables[0][static_cast<std::size_t>(m)];
    return;
  }
  // collapse the two fastest axes into a plane, iterate the rest
  std::size_t const plane = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  std::size_t const outer = out.v.size() / plane;
  for (std::size_t o = 0; o < outer; ++o)
  {
    double w = 1.0;
    std::size_t rem = o;
    for (int i = 2; i < d; ++i)
    {
      w *= axis_tables[static_cast<std::size_t>(i)][rem % static_cast<std::size_t>(n)];
      rem /= static_cast<std::size_t>(n);
    }
    if (w == 0.0)
      continue;
    for (long b = 0; b < n; ++b)
    {
      double const wb = w * axis_tables[1][static_cast<std::size_t>(b)];
      if (wb == 0.0)
        continue;
      double* row = out.v.data() + o * plane + static_cast<std::size_t>(b) * static_cast<std::size_t>(n);
      for (long a = 0; a < n; ++a)
        row[a] += wb * axis_tables[0][static_cast<std::size_t>(a)];
    }
  }
}

double overlap(double a0, double a1, double b0, double b1)
{
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

} // namespace

Raster Raster::zeros(int d, long n)
{
  require(d >= 1 && d <= max_dim && n >= 1, ErrorCode::invalid_argument, "Raster: invalid shape");
  Raster r;
  r.d = d;
  r.n = n;
  r.v.assign(pixel_count(d, n), 0.0);
  return r;
}

double lorentzian(double p, double s, double x)
{
  return s / (s * s + (x - p) * (x - p));
}

void LorentzianSpectrum::validate() const
{
  require(d >= 1 && d <= max_dim, ErrorCode::invalid_argument, "LorentzianSpectrum: d must be in 1..5");
  require(!peaks.empty(), ErrorCode::invalid_argument, "LorentzianSpectrum: need at least one peak");
  for (auto const& pk : peaks)
  {
    require(static_cast<int>(pk.p.size()) == d && static_cast<int>(pk.s.size()) == d,
            ErrorCode::invalid_argument, "LorentzianSpectrum: peak dimension mismatch");
    for (double s : pk.s)
      require(s > 0.0, ErrorCode::invalid_argument, "LorentzianSpectrum: widths must be positive");
  }
}

double eval_spectrum(LorentzianSpectrum const& model, std::span<double const> x)
{
  require(static_cast<int>(x.size()) == model.d, ErrorCode::invalid_argument, "eval_spectrum: dimension mismatch");
  double total = 0.0;
  for (auto const& pk : model.peaks)
  {
    double v = pk.amplitude;
    for (int i = 0; i < model.d; ++i)
      v *= lorentzian(pk.p[static_cast<std::size_t>(i)], pk.s[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
    total += v;
  }
  return total;
}

void BlockPhantom::validate() const
{
  require(d >= 1 && d <= max_dim, ErrorCode::invalid_argument, "BlockPhantom: d must be in 1..5");
  for (auto const& b : boxes)
  {
    require(static_cast<int>(b.lo.size()) == d && static_cast<int>(b.hi.size()) == d, ErrorCode::invalid_argument,
            "BlockPhantom: box dimension mismatch");
    for (int i = 0; i < d; ++i)
      require(b.lo[static_cast<std::size_t>(i)] >= -1.0 && b.hi[static_cast<std::size_t>(i)] <= 1.0 &&
                  b.lo[static_cast<std::size_t>(i)] < b.hi[static_cast<std::size_t>(i)],
              ErrorCode::invalid_argument, "BlockPhantom: boxes must be nonempty and inside [-1,1]^d");
  }
  for (auto const& c : checkers)
  {
    require(static_cast<int>(c.origin.size()) == d && static_cast<int>(c.size.size()) == d,
            ErrorCode::invalid_argument, "BlockPhantom: checkerboard dimension mismatch");
    require(c.cell > 0.0, ErrorCode::invalid_argument, "BlockPhantom: checkerboard cell must be positive");
    for (int i = 0; i < d; ++i)
      require(c.origin[static_cast<std::size_t>(i)] >= -1.0 &&
                  c.origin[static_cast<std::size_t>(i)] + c.size[static_cast<std::size_t>(i)] <= 1.0 + 1e-12 &&
                  c.size[static_cast<std::size_t>(i)] > 0.0,
              ErrorCode::invalid_argument, "BlockPhantom: checkerboard must lie inside [-1,1]^d");
  }
}

std::vector<Box> BlockPhantom::flatten() const
{
  validate();
  std::vector<Box> out = boxes;
  for (auto const& c : checkers)
  {
    std::vector<long> cells(static_cast<std::size_t>(d));
    long total = 1;
    for (int i = 0; i < d; ++i)
    {
      cells[static_cast<std::size_t>(i)] =
          static_cast<long>(std::ceil(c.size[static_cast<std::size_t>(i)] / c.cell - 1e-9));
      total *= cells[static_cast<std::size_t>(i)];
    }
    for (long idx = 0; idx < total; ++idx)
    {
      long rem = idx, parity = 0;
      Box b;
      b.value = c.contrast;
      for (int i = 0; i < d; ++i)
      {
        long const m = rem % cells[static_cast<std::size_t>(i)];
        rem /= cells[static_cast<std::size_t>(i)];
        parity += m;
        double const lo = c.origin[static_cast<std::size_t>(i)] + static_cast<double>(m) * c.cell;
        b.lo.push_back(lo);
        b.hi.push_back(std::min(lo + c.cell, c.origin[static_cast<std::size_t>(i)] + c.size[static_cast<std::size_t>(i)]));
      }
      if (parity % 2 == 0)
        out.push_back(std::move(b));
    }
  }
  return out;
}

int source_dim(ImageSource const& src)
{
  return std::visit([](auto const& s) { return s.d; }, src);
}

Raster cell_average(ImageSource const& src, long n)
{
  require(n >= 1, ErrorCode::invalid_argument, "cell_average: n must be >= 1");
  int const d = source_dim(src);
  Raster out = Raster::zeros(d, n);
  double const h = out.pixel_width();
  auto edge = [&](long m) { return -1.0 + h * static_cast<double>(m); };

  if (auto const* spec = std::get_if<LorentzianSpectrum>(&src))
  {
    spec->validate();
    for (auto const& pk : spec->peaks)
    {
      std::vector<std::vector<double>> tables(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(n)));
      for (int i = 0; i < d; ++i)
      {
        double const p = pk.p[static_cast<std::size_t>(i)], s = pk.s[static_cast<std::size_t>(i)];
        for (long m = 0; m < n; ++m)
          tables[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
              (std::atan((edge(m + 1) - p) / s) - std::atan((edge(m) - p) / s)) / h;
        if (i == 0)
          for (auto& v : tables[0])
            v *= pk.amplitude;
      }
      add_separable(out, tables);
    }
    return out;
  }
  if (auto const* ph = std::get_if<BlockPhantom>(&src))
  {
    for (auto const& b : ph->flatten())
    {
      std::vector<std::vector<double>> tables(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(n)));
      for (int i = 0; i < d; ++i)
        for (long m = 0; m < n; ++m)
          tables[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
              overlap(edge(m), edge(m + 1), b.lo[static_cast<std::size_t>(i)], b.hi[static_cast<std::size_t>(i)]) / h;
      for (auto& v : tables[0])
        v *= b.value;
      add_separable(out, tables);
    }
    return out;
  }
  auto const& r = std::get<Raster>(src);
  require(r.v.size() == pixel_count(r.d, r.n), ErrorCode::invalid_argument, "cell_average: malformed raster");
  require(n % r.n == 0, ErrorCode::invalid_argument,
          "cell_average: target resolution must be a multiple of the raster resolution");
  long const f = n / r.n;
  for (std::size_t idx = 0; idx < out.v.size(); ++idx)
  {
    std::size_t rem = idx, src_idx = 0, stride = 1;
    for (int i = 0; i < d; ++i)
    {
      std::size_t const m = rem % static_cast<std::size_t>(n);
      rem /= static_cast<std::size_t>(n);
      src_idx += (m / static_cast<std::size_t>(f)) * stride;
      stride *= static_cast<std::size_t>(r.n);
    }
    out.v[idx] = r.v[src_idx];
  }
  return out;
}

double l1_error(Raster const& recon, Raster const& reference)
{
  require(recon.d == reference.d && recon.n == reference.n && recon.v.size() == reference.v.size(),
          ErrorCode::invalid_argument, "l1_error: shape mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < recon.v.size(); ++i)
  {
    num += std::abs(recon.v[i] - reference.v[i]);
    den += std::abs(reference.v[i]);
  }
  require(den > 0.0, ErrorCode::invalid_argument, "l1_error: reference image is zero");
  return num / den;
}

double patch_correlation(Raster const& a, Raster const& b, std::span<double const> lo, std::span<double const> hi)
{
  require(a.d == b.d && a.n == b.n, ErrorCode::invalid_argument, "patch_correlation: shape mismatch");
  require(static_cast<int>(lo.size()) == a.d && static_cast<int>(hi.size()) == a.d, ErrorCode::invalid_argument,
          "patch_correlation: patch dimension mismatch");
  double const h = a.pixel_width();
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  long count = 0;
  for (std::size_t idx = 0; idx < a.v.size(); ++idx)
  {
    std::size_t rem = idx;
    bool inside = true;
    for (int i = 0; i < a.d; ++i)
    {
      double const c = -1.0 + h * (static_cast<double>(rem % static_cast<std::size_t>(a.n)) + 0.5);
      rem /= static_cast<std::size_t>(a.n);
      inside = inside && c >= lo[static_cast<std::size_t>(i)] && c <= hi[static_cast<std::size_t>(i)];
    }
    if (!inside)
      continue;
    double const x = a.v[idx], y = b.v[idx];
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
    ++count;
  }
  require(count >= 2, ErrorCode::invalid_argument, "patch_correlation: patch holds fewer than two pixels");
  double const c = static_cast<double>(count);
  double const va = saa - sa * sa / c, vb = sbb - sb * sb / c;
  if (va <= 0.0 || vb <= 0.0)
    return 0.0;
  return (sab - sa * sb / c) / std::sqrt(va * vb);
}

} // namespace cohere
