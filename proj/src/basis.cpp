#include "cohere/basis.hpp"

#include "cohere/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cohere
{

IntPoint::IntPoint(std::initializer_list<long> v)
{
  require(v.size() >= 1 && v.size() <= max_dim, ErrorCode::invalid_argument,
          "IntPoint: dimension must be in 1..5");
  d = static_cast<int>(v.size());
  std::size_t i = 0;
  for (long x : v)
    c[i++] = x;
}

IntPoint IntPoint::zeros(int d)
{
  require(d >= 1 && d <= max_dim, ErrorCode::invalid_argument, "IntPoint: dimension must be in 1..5");
  IntPoint p;
  p.d = d;
  return p;
}

bool operator==(IntPoint const& a, IntPoint const& b)
{
  if (a.d != b.d)
    return false;
  for (int i = 0; i < a.d; ++i)
    if (a[i] != b[i])
      return false;
  return true;
}

std::strong_ordering operator<=>(IntPoint const& a, IntPoint const& b)
{
  if (a.d != b.d)
    return a.d <=> b.d;
  for (int i = 0; i < a.d; ++i)
    if (a[i] != b[i])
      return a[i] <=> b[i];
  return std::strong_ordering::equal;
}

long IntPoint::max_abs() const
{
  long m = 0;
  for (int i = 0; i < d; ++i)
    m = std::max(m, std::abs(c[static_cast<std::size_t>(i)]));
  return m;
}

std::string IntPoint::str() const
{
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < d; ++i)
    os << (i ? "," : "") << c[static_cast<std::size_t>(i)];
  os << ')';
  return os.str();
}

std::size_t IntPointHash::operator()(IntPoint const& p) const noexcept
{
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p.d);
  for (int i = 0; i < p.d; ++i)
  {
    h ^= static_cast<std::uint64_t>(p[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

int TensorWaveletIndex::scale_sum() const
{
  int s = 0;
  for (int i = 0; i < k.d; ++i)
    s += j[static_cast<std::size_t>(i)];
  return s;
}

double BasisConfig::max_eps(int J, int p)
{
  return 1.0 / (2.0 + std::ldexp(1.0, -J + 2) * (p - 1));
}

void BasisConfig::validate() const
{
  require(d >= 1 && d <= max_dim, ErrorCode::invalid_argument, "BasisConfig: d must be in 1..5");
  require(J >= 0, ErrorCode::invalid_argument, "BasisConfig: J must be >= 0");
  require(fam.p >= 1 && static_cast<int>(fam.h.size()) == 2 * fam.p, ErrorCode::invalid_argument,
          "BasisConfig: malformed wavelet family");
  require(eps > 0.0 && eps <= max_eps(J, fam.p) * (1.0 + 1e-12), ErrorCode::invalid_argument,
          "BasisConfig: eps outside (0, " + std::to_string(max_eps(J, fam.p)) + "]");
  require(budget > 0, ErrorCode::invalid_argument, "BasisConfig: budget must be positive");
  ft.validate();
}

TranslationRange translation_range(int p, int j)
{
  // supp phi_{j,k} = 2^{-j}[k - p + 1, k + p]; need 2^{-j}(k-p+1) < 1 and 2^{-j}(k+p) > -1.
  long const two_j = 1L << j;
  return {-two_j - p + 1, two_j + p - 2};
}

long long separable_level_size(BasisConfig const& cfg, int j)
{
  long double per_axis = static_cast<long double>(translation_range(cfg.fam.p, j).count());
  long double types = std::ldexp(1.0L, cfg.d) - (j == cfg.J ? 0 : 1);
  long double total = types * std::pow(per_axis, cfg.d);
  if (total > 9e18L)
    return static_cast<long long>(9e18L);
  return static_cast<long long>(total);
}

std::vector<SeparableWaveletIndex> enumerate_separable_level(BasisConfig const& cfg, int j)
{
  require(j >= cfg.J, ErrorCode::invalid_argument,
          "enumerate_separable_level: level " + std::to_string(j) + " below base level");
  require(j < 40, ErrorCode::capacity, "enumerate_separable_level: level too large");
  long long const size = separable_level_size(cfg, j);
  require(size <= cfg.budget, ErrorCode::capacity,
          "enumerate_separable_level: level " + std::to_string(j) + " has " + std::to_string(size) +
              " elements, exceeding the budget");

  TranslationRange const tr = translation_range(cfg.fam.p, j);
  std::vector<SeparableWaveletIndex> out;
  out.reserve(static_cast<std::size_t>(size));
  unsigned const n_types = 1u << cfg.d;
  for (unsigned s = (j == cfg.J ? 0u : 1u); s < n_types; ++s)
  {
    IntPoint k = IntPoint::zeros(cfg.d);
    for (int i = 0; i < cfg.d; ++i)
      k[i] = tr.lo;
    while (true)
    {
      out.push_back({s, j, k});
      int ax = cfg.d - 1;
      while (ax >= 0 && k[ax] == tr.hi)
      {
        k[ax] = tr.lo;
        --ax;
      }
      if (ax < 0)
        break;
      ++k[ax];
    }
  }
  return out;
}

bool is_valid(BasisConfig const& cfg, SeparableWaveletIndex const& w)
{
  if (w.k.d != cfg.d || w.j < cfg.J || w.s >= (1u << cfg.d))
    return false;
  if (w.s == 0 && w.j != cfg.J)
    return false;
  TranslationRange const tr = translation_range(cfg.fam.p, w.j);
  for (int i = 0; i < cfg.d; ++i)
    if (w.k[i] < tr.lo || w.k[i] > tr.hi)
      return false;
  return true;
}

bool is_valid(BasisConfig const& cfg, TensorWaveletIndex const& w)
{
  if (w.k.d != cfg.d || w.s >= (1u << cfg.d))
    return false;
  for (int i = 0; i < cfg.d; ++i)
  {
    int const ji = w.j[static_cast<std::size_t>(i)];
    bool const wav = (w.s >> i) & 1u;
    if (ji < cfg.J || (!wav && ji != cfg.J))
      return false;
    TranslationRange const tr = translation_range(cfg.fam.p, ji);
    if (w.k[i] < tr.lo || w.k[i] > tr.hi)
      return false;
  }
  return true;
}

cplx ft_dilated(BasisConfig const& cfg, int s, int j, long k, double omega)
{
  double const scale = std::ldexp(1.0, -j);
  double const w = scale * omega;
  cplx const base = s == 0 ? ft_scaling(cfg.fam, w, cfg.ft) : ft_wavelet(cfg.fam, w, cfg.ft);
  double const phase = -2.0 * std::numbers::pi * std::fmod(static_cast<double>(k) * w, 1.0);
  return std::polar(std::sqrt(scale), phase) * base;
}

cplx inner_product_sep(BasisConfig const& cfg, SeparableWaveletIndex const& w, FourierIndex const& f)
{
  require(w.k.d == cfg.d && f.d == cfg.d, ErrorCode::invalid_argument,
          "inner_product_sep: dimension mismatch");
  cplx acc = std::pow(cfg.eps, cfg.d / 2.0);
  for (int i = 0; i < cfg.d; ++i)
  {
    int const s = static_cast<int>((w.s >> i) & 1u);
    acc *= ft_dilated(cfg, s, w.j, w.k[i], cfg.eps * static_cast<double>(f[i]));
  }
  return acc;
}

cplx inner_product_tensor(BasisConfig const& cfg, TensorWaveletIndex const& w, FourierIndex const& f)
{
  require(w.k.d == cfg.d && f.d == cfg.d, ErrorCode::invalid_argument,
          "inner_product_tensor: dimension mismatch");
  cplx acc = std::pow(cfg.eps, cfg.d / 2.0);
  for (int i = 0; i < cfg.d; ++i)
  {
    int const s = static_cast<int>((w.s >> i) & 1u);
    acc *= ft_dilated(cfg, s, w.j[static_cast<std::size_t>(i)], w.k[i],
                      cfg.eps * static_cast<double>(f[i]));
  }
  return acc;
}

} // namespace cohere
