#pragma once

#include "cohere/coherence.hpp"
#include "cohere/ordering.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace cohere
{
struct SparsityProfile
{
  std::vector<long long> M; // level boundaries, strictly increasing
  std::vector<long long> s; // per-level sparsities

  void validate() const;
};

struct SamplingScheme
{
  std::vector<long long> N; // level boundaries
  std::vector<long long> m; // per-level counts
  std::vector<long long> omega; // sampled 1-based ranks, ascending
  std::uint64_t seed = 0;

  long long level_size(std::size_t k) const;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Generator for level k: mt19937_64 seeded with splitmix64(seed + k).
std::mt19937_64 level_stream(std::uint64_t seed, std::size_t level);

/// Uniform integer in [0, n) by rejection; identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

SamplingScheme build_scheme(std::vector<long long> N, std::vector<long long> m, std::uint64_t seed);

/// m_k = min(|level k|, ceil(|level k| C ln(1/eps_f) sum_l mu(k,l) s_l ln N)).
std::vector<long long> estimate_mk(LocalCoherenceMatrix const& local, SparsityProfile const& sp, double eps_f,
                                   double C, long long N_total);

struct Mask
{
  int d = 2;
  long extent = 0;
  std::vector<std::uint8_t> cells; // axis 0 fastest
  std::vector<long long> outside;  // sampled ranks that fall outside the box

  long side() const { return 2 * extent + 1; }
  std::size_t offset(IntPoint const& n) const;
  bool contains(IntPoint const& n) const;
  bool at(IntPoint const& n) const { return cells[offset(n)] != 0; }
};

Mask rasterize_mask(SamplingScheme const& scheme, OrderingEnum const& ordering, long extent, bool strict = false);

/// Reads sampled ranks back from a mask.
std::vector<long long> mask_ranks(Mask const& mask, OrderingEnum const& ordering);

} // namespace cohere
