#include "cohere/sampling.hpp"

#include "cohere/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cohere
{

void SparsityProfile::validate() const
{
  require(!M.empty() && M.size() == s.size(), ErrorCode::invalid_argument,
          "SparsityProfile: M and s must be nonempty and of equal length");
  long long prev = 0;
  for (std::size_t l = 0; l < M.size(); ++l)
  {
    require(M[l] > prev, ErrorCode::invalid_argument, "SparsityProfile: M must be strictly increasing");
    require(s[l] >= 0 && s[l] <= M[l] - prev, ErrorCode::invalid_argument,
            "SparsityProfile: s_l must lie in [0, M_l - M_{l-1}]");
    prev = M[l];
  }
}

long long SamplingScheme::level_size(std::size_t k) const
{
  return N[k] - (k == 0 ? 0 : N[k - 1]);
}

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 level_stream(std::uint64_t seed, std::size_t level)
{
  return std::mt19937_64(splitmix64(seed + static_cast<std::uint64_t>(level)));
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n)
{
  require(n > 0, ErrorCode::invalid_argument, "uniform_below: n must be positive");
  std::uint64_t const threshold = (0 - n) % n;
  while (true)
  {
    std::uint64_t const r = rng();
    if (r >= threshold)
      return r % n;
  }
}

SamplingScheme build_scheme(std::vector<long long> N, std::vector<long long> m, std::uint64_t seed)
{
  require(!N.empty() && N.size() == m.size(), ErrorCode::invalid_argument,
          "build_scheme: N and m must be nonempty and of equal length");
  SamplingScheme sc;
  sc.N = std::move(N);
  sc.m = std::move(m);
  sc.seed = seed;
  long long prev = 0;
  for (std::size_t k = 0; k < sc.N.size(); ++k)
  {
    require(sc.N[k] > prev, ErrorCode::invalid_argument, "build_scheme: level boundaries must increase");
    long long const size = sc.N[k] - prev;
    require(sc.m[k] >= 0 && sc.m[k] <= size, ErrorCode::invalid_argument,
            "build_scheme: m_" + std::to_string(k + 1) + " = " + std::to_string(sc.m[k]) +
                " exceeds level size " + std::to_string(size));

    // partial Fisher-Yates over the level's ranks
    std::vector<long long> pool(static_cast<std::size_t>(size));
    std::iota(pool.begin(), pool.end(), prev + 1);
    auto rng = level_stream(seed, k);
    for (long long i = 0; i < sc.m[k]; ++i)
    {
      auto const pick = static_cast<long long>(uniform_below(rng, static_cast<std::uint64_t>(size - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(i + pick)]);
      sc.omega.push_back(pool[static_cast<std::size_t>(i)]);
    }
    prev = sc.N[k];
  }
  std::sort(sc.omega.begin(), sc.omega.end());
  return sc;
}

std::vector<long long> estimate_mk(LocalCoherenceMatrix const& local, SparsityProfile const& sp, double eps_f,
                                   double C, long long N_total)
{
  sp.validate();
  require(local.cols() == static_cast<int>(sp.M.size()), ErrorCode::invalid_argument,
          "estimate_mk: sparsity levels do not match the local coherence columns");
  require(static_cast<int>(local.levels_n.size()) == local.rows(), ErrorCode::invalid_argument,
          "estimate_mk: malformed local coherence matrix");
  require(eps_f > 0.0 && eps_f < 1.0, ErrorCode::invalid_argument, "estimate_mk: eps_f must lie in (0, 1)");
  require(C > 0.0, ErrorCode::invalid_argument, "estimate_mk: C must be positive");
  require(N_total >= 2, ErrorCode::invalid_argument, "estimate_mk: N must be >= 2");

  std::vector<long long> m(static_cast<std::size_t>(local.rows()));
  long long prev = 0;
  for (int k = 0; k < local.rows(); ++k)
  {
    long long const size = local.levels_n[static_cast<std::size_t>(k)] - prev;
    double weight = 0.0;
    for (int l = 0; l < local.cols(); ++l)
      weight += local.mu(k, l) * static_cast<double>(sp.s[static_cast<std::size_t>(l)]);
    double const want = static_cast<double>(size) * C * std::log(1.0 / eps_f) * weight *
                        std::log(static_cast<double>(N_total));
    // guard against 68.99999 style rounding
    double const up = std::ceil(want - 1e-9 * std::max(1.0, want));
    m[static_cast<std::size_t>(k)] = std::min<long long>(size, static_cast<long long>(std::max(0.0, up)));
    prev = local.levels_n[static_cast<std::size_t>(k)];
  }
  return m;
}

std::size_t Mask::offset(IntPoint const& n) const
{
  std::size_t off = 0, stride = 1;
  for (int i = 0; i < d; ++i)
  {
    off += static_cast<std::size_t>(n[i] + extent) * stride;
    stride *= static_cast<std::size_t>(side());
  }
  return off;
}

bool Mask::contains(IntPoint const& n) const
{
  if (n.d != d)
    return false;
  for (int i = 0; i < d; ++i)
    if (std::abs(n[i]) > extent)
      return false;
  return true;
}

Mask rasterize_mask(SamplingScheme const& scheme, OrderingEnum const& ordering, long extent, bool strict)
{
  require(extent >= 0, ErrorCode::invalid_argument, "rasterize_mask: extent must be >= 0");
  Mask mask;
  mask.d = ordering.cons.d;
  mask.extent = extent;
  std::size_t cells = 1;
  for (int i = 0; i < mask.d; ++i)
    cells *= static_cast<std::size_t>(mask.side());
  mask.cells.assign(cells, 0);
  for (long long r : scheme.omega)
  {
    IntPoint const& n = ordering.at(r);
    if (mask.contains(n))
      mask.cells[mask.offset(n)] = 1;
    else
      mask.outside.push_back(r);
  }
  if (strict && !mask.outside.empty())
    fail(ErrorCode::invalid_argument, "rasterize_mask: " + std::to_string(mask.outside.size()) +
                                          " sampled ranks fall outside extent " + std::to_string(extent));
  return mask;
}

std::vector<long long> mask_ranks(Mask const& mask, OrderingEnum const& ordering)
{
  std::vector<long long> out;
  for (long long r = 1; r <= ordering.size(); ++r)
  {
    IntPoint const& n = ordering.at(r);
    if (mask.contains(n) && mask.at(n))
      out.push_back(r);
  }
  return out;
}

} // namespace cohere
