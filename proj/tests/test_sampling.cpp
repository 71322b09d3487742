#include "cohere/error.hpp"
#include "cohere/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace cohere;

TEST_CASE("scheme construction")
{
  auto const s = build_scheme({4, 8}, {4, 2}, 17);
  REQUIRE(s.omega.size() == 6);
  for (long long r = 1; r <= 4; ++r)
    CHECK(std::count(s.omega.begin(), s.omega.end(), r) == 1);
  CHECK(std::count_if(s.omega.begin(), s.omega.end(), [](long long r) { return r >= 5 && r <= 8; }) == 2);
  CHECK(std::is_sorted(s.omega.begin(), s.omega.end()));

  CHECK(build_scheme({4, 8, 20}, {0, 0, 0}, 1).omega.empty());

  auto const a = build_scheme({10, 100, 1000}, {5, 30, 200}, 99);
  auto const b = build_scheme({10, 100, 1000}, {5, 30, 200}, 99);
  CHECK(a.omega == b.omega);
  auto const c = build_scheme({10, 100, 1000}, {5, 30, 200}, 100);
  CHECK(a.omega != c.omega);

  CHECK_THROWS_AS(build_scheme({4, 8}, {5, 0}, 0), Error);
  CHECK_THROWS_AS(build_scheme({4, 8}, {1, 5}, 0), Error);
  CHECK_THROWS_AS(build_scheme({4, 4}, {1, 0}, 0), Error);
  CHECK_THROWS_AS(build_scheme({4, 8}, {1}, 0), Error);
}

TEST_CASE("levels are uniform")
{
  std::map<long long, int> hits;
  int const trials = 2000;
  for (int seed = 0; seed < trials; ++seed)
  {
    auto const s = build_scheme({4, 8}, {1, 1}, static_cast<std::uint64_t>(seed));
    REQUIRE(s.omega.size() == 2);
    CHECK(s.omega[0] <= 4);
    ++hits[s.omega[1]];
  }
  for (long long r = 5; r <= 8; ++r)
    CHECK(std::abs(hits[r] / static_cast<double>(trials) - 0.25) <= 0.03);
}

TEST_CASE("level streams follow the documented seeding")
{
  // stream k is mt19937_64 seeded with splitmix64(seed + k)
  std::mt19937_64 ref(splitmix64(123 + 2));
  auto g = level_stream(123, 2);
  for (int i = 0; i < 10; ++i)
    CHECK(g() == ref());
  // reference splitmix64 output for input 0
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("measurement estimates")
{
  LocalCoherenceMatrix loc;
  loc.levels_n = {100};
  loc.levels_m = {100};
  loc.mu = Eigen::MatrixXd::Constant(1, 1, 0.01);
  SparsityProfile sp{{100}, {5}};
  auto const m = estimate_mk(loc, sp, 0.05, 1.0, 100);
  REQUIRE(m.size() == 1);
  long long const expect =
      std::min(100LL, static_cast<long long>(std::ceil(100 * std::log(20.0) * 0.01 * 5 * std::log(100.0))));
  CHECK(expect == 69);
  CHECK(m[0] == 69);

  SparsityProfile zero{{100}, {0}};
  CHECK(estimate_mk(loc, zero, 0.05, 1.0, 100)[0] == 0);

  LocalCoherenceMatrix ones;
  ones.levels_n = {10, 30};
  ones.levels_m = {10, 30};
  ones.mu = Eigen::MatrixXd::Ones(2, 2);
  SparsityProfile full{{10, 30}, {10, 20}};
  auto const clamp = estimate_mk(ones, full, 0.05, 1.0, 30);
  CHECK(clamp == std::vector<long long>{10, 20});

  // monotone in every s_l and mu entry
  LocalCoherenceMatrix base;
  base.levels_n = {50, 200, 800};
  base.levels_m = {50, 200, 800};
  base.mu = Eigen::MatrixXd::Constant(3, 3, 1e-4);
  SparsityProfile sp3{{50, 200, 800}, {4, 6, 8}};
  auto const m0 = estimate_mk(base, sp3, 0.1, 0.5, 800);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
    {
      auto bumped = base;
      bumped.mu(k, l) *= 3.0;
      auto const m1 = estimate_mk(bumped, sp3, 0.1, 0.5, 800);
      for (int i = 0; i < 3; ++i)
        CHECK(m1[static_cast<std::size_t>(i)] >= m0[static_cast<std::size_t>(i)]);
    }
  for (int l = 0; l < 3; ++l)
  {
    auto sp4 = sp3;
    sp4.s[static_cast<std::size_t>(l)] += 3;
    auto const m1 = estimate_mk(base, sp4, 0.1, 0.5, 800);
    for (int i = 0; i < 3; ++i)
      CHECK(m1[static_cast<std::size_t>(i)] >= m0[static_cast<std::size_t>(i)]);
  }

  SparsityProfile bad{{50, 200}, {4, 6}};
  CHECK_THROWS_AS(estimate_mk(base, bad, 0.1, 0.5, 800), Error);
}

TEST_CASE("mask rasterization")
{
  auto const ord = OrderingEnum::build(ConsistencyFn::linear(2, ShapeDescriptor::box()), 81);
  auto const s = build_scheme({9, 81}, {9, 0}, 1);
  auto const mask = rasterize_mask(s, ord, 2);
  CHECK(mask.side() == 5);
  for (long x = -2; x <= 2; ++x)
    for (long y = -2; y <= 2; ++y)
      CHECK(mask.at(IntPoint{x, y}) == (std::abs(x) <= 1 && std::abs(y) <= 1));
  CHECK(mask.outside.empty());

  auto const none = rasterize_mask(build_scheme({9}, {0}, 1), ord, 2);
  CHECK(std::count(none.cells.begin(), none.cells.end(), 1) == 0);

  // out-of-extent ranks are reported, and refused in strict mode
  auto const wide = build_scheme({9, 81}, {9, 72}, 1);
  auto const small = rasterize_mask(wide, ord, 2);
  CHECK(small.outside.size() == 81 - 25);
  CHECK_THROWS_AS(rasterize_mask(wide, ord, 2, true), Error);
}

TEST_CASE("mask read-back returns the in-extent ranks")
{
  for (auto const& cons : {ConsistencyFn::linear(2, ShapeDescriptor::ball()), ConsistencyFn::hyperbolic_z(2)})
  {
    auto const ord = OrderingEnum::build(cons, 4000);
    auto const s = build_scheme({100, 1000, 4000}, {60, 200, 300}, 5);
    long const extent = 20;
    auto const mask = rasterize_mask(s, ord, extent);
    std::vector<long long> inside;
    for (long long r : s.omega)
      if (ord.at(r).max_abs() <= extent)
        inside.push_back(r);
    CHECK(mask_ranks(mask, ord) == inside);
    CHECK(inside.size() + mask.outside.size() == s.omega.size());
  }
}

TEST_CASE("hyperbolic levels fill the axes more densely than the diagonals")
{
  auto const ord = OrderingEnum::build(ConsistencyFn::hyperbolic_z(2), 20000);
  auto const s = build_scheme({200, 2000, 20000}, {200, 600, 1500}, 3);
  long const E = 40;
  auto const mask = rasterize_mask(s, ord, E);
  // band around the axes versus band around the diagonals, radius 10..40
  long axis = 0, axis_n = 0, diag = 0, diag_n = 0;
  for (long t = 10; t <= E; ++t)
    for (long w = -2; w <= 2; ++w)
    {
      for (IntPoint const& p : {IntPoint{t, w}, IntPoint{-t, w}, IntPoint{w, t}, IntPoint{w, -t}})
      {
        axis += mask.at(p);
        ++axis_n;
      }
      for (IntPoint const& p : {IntPoint{t, t + w}, IntPoint{-t, t + w}, IntPoint{t, -t + w}, IntPoint{-t, -t + w}})
        if (p.max_abs() <= E)
        {
          diag += mask.at(p);
          ++diag_n;
        }
    }
  CHECK(static_cast<double>(axis) / axis_n > static_cast<double>(diag) / diag_n);
}
