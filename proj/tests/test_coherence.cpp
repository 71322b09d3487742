#include "cohere/coherence.hpp"
#include "cohere/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cohere;
using std::numbers::pi;

namespace
{
double haar_phi2(double w)
{
  if (w == 0.0)
    return 1.0;
  double const s = std::sin(pi * w);
  return s * s / (pi * w * pi * w);
}

double haar_psi2(double w)
{
  if (w == 0.0)
    return 0.0;
  double const s = std::sin(pi * w / 2.0);
  return std::pow(s * s / (pi * w / 2.0), 2);
}

// sup over s and j <= 30 of eps^d 2^{-dj} prod |F phi^{s_i}(eps 2^{-j} n_i)|^2, Haar, J = 0
double haar_separable_sup(IntPoint const& n, double eps)
{
  int const d = n.d;
  double best = 0.0;
  for (int j = 0; j <= 30; ++j)
    for (unsigned s = (j == 0 ? 0u : 1u); s < (1u << d); ++s)
    {
      double v = std::pow(eps * std::ldexp(1.0, -j), d);
      for (int i = 0; i < d; ++i)
      {
        double const w = eps * std::ldexp(1.0, -j) * static_cast<double>(n[i]);
        v *= (s >> i & 1u) ? haar_psi2(w) : haar_phi2(w);
      }
      best = std::max(best, v);
    }
  return best;
}

BasisConfig haar(int d)
{
  BasisConfig c;
  c.d = d;
  return c;
}
} // namespace

TEST_CASE("frequency coherence: point values")
{
  CHECK(frequency_coherence(haar(1), IntPoint{0}, WaveletKind::separable) == doctest::Approx(0.5));
  CHECK(frequency_coherence(haar(2), IntPoint{0, 0}, WaveletKind::separable) == doctest::Approx(0.25));
  CHECK(frequency_coherence(haar(2), IntPoint{0, 0}, WaveletKind::tensor) == doctest::Approx(0.25));
  for (long n = 1; n < 50; ++n)
    CHECK(frequency_coherence(haar(1), IntPoint{n}, WaveletKind::separable) ==
          doctest::Approx(frequency_coherence(haar(1), IntPoint{-n}, WaveletKind::separable)).epsilon(1e-14));
}

TEST_CASE("frequency coherence: Haar closed-form scan")
{
  std::mt19937_64 rng(9);
  for (int d = 1; d <= 2; ++d)
    for (int t = 0; t < 100; ++t)
    {
      IntPoint n = IntPoint::zeros(d);
      for (int i = 0; i < d; ++i)
        n[i] = static_cast<long>(rng() % 2001) - 1000;
      CAPTURE(n.str());
      CHECK(frequency_coherence(haar(d), n, WaveletKind::separable) ==
            doctest::Approx(haar_separable_sup(n, 0.5)).epsilon(1e-9));
    }
}

TEST_CASE("frequency coherence: early termination equals full scan")
{
  std::mt19937_64 rng(13);
  for (int p : {1, 2})
    for (int d = 1; d <= 2; ++d)
    {
      BasisConfig cfg;
      cfg.d = d;
      cfg.fam = build_family(p);
      cfg.eps = BasisConfig::max_eps(0, p);
      for (auto kind : {WaveletKind::separable, WaveletKind::tensor})
        for (int t = 0; t < 100; ++t)
        {
          IntPoint n = IntPoint::zeros(d);
          for (int i = 0; i < d; ++i)
            n[i] = static_cast<long>(rng() % 4001) - 2000;
          double const fast = frequency_coherence(cfg, n, kind);
          double const slow = frequency_coherence_bruteforce(cfg, n, kind, 25);
          CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
        }
    }
}

TEST_CASE("row profile invariants")
{
  auto const prefix = lattice_prefix(ConsistencyFn::standard(), 4096);
  auto const prof = row_profile(haar(1), prefix, WaveletKind::separable);
  REQUIRE(prof.row.size() == 4096);
  CHECK(prof.row[0] == doctest::Approx(0.5));
  for (std::size_t i = 0; i < prof.row.size(); ++i)
  {
    CHECK(prof.row[i] >= 0.0);
    CHECK(prof.row[i] <= 1.0);
    CHECK(prof.suffix[i] >= prof.row[i]);
    double const next = i + 1 < prof.row.size() ? prof.suffix[i + 1] : 0.0;
    CHECK(prof.suffix[i] == std::max(prof.row[i], next));
  }
  // N mu bounded for 1-D Haar with the natural ordering
  double lo = 1e300, hi = 0.0;
  for (std::size_t N = 16; N <= 4096; ++N)
  {
    double const v = static_cast<double>(N) * prof.row[N - 1];
    if (v > 0.0)
    {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  CHECK(hi / lo <= 25.0);

  // threads do not change the result
  auto const prof4 = row_profile(haar(1), prefix, WaveletKind::separable, 4);
  CHECK(prof4.row == prof.row);
}

TEST_CASE("wavelet row profile")
{
  auto const prefix = separable_prefix(haar(1), 64);
  auto const prof = wavelet_row_profile(haar(1), prefix);
  REQUIRE(prof.row.size() == 64);
  CHECK(prefix[0].s == 0);
  CHECK(prof.row[0] == doctest::Approx(0.5));
  CHECK_FALSE(prof.boundary_attained);
  // single element: frequency sup of its squared coefficients over a wide window
  for (std::size_t i : {5u, 20u, 63u})
  {
    double best = 0.0;
    for (long n = -4000; n <= 4000; ++n)
      best = std::max(best, std::norm(inner_product_sep(haar(1), prefix[i], IntPoint{n})));
    CHECK(prof.row[i] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("local coherence: explicit matrix")
{
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
  auto const loc = local_coherence(I, {2}, {2});
  CHECK(loc.mu(0, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(local_coherence(I, {1, 1}, {2}), Error);
}

TEST_CASE("local coherence: Fourier and separable Haar")
{
  auto const cfg = haar(1);
  auto const fourier = lattice_prefix(ConsistencyFn::standard(), 256);
  auto const wav = separable_prefix(cfg, 256);
  std::vector<long long> const N = {2, 8, 32, 128, 256};
  std::vector<long long> const M = {2, 4, 16, 64, 256};
  auto const loc = local_coherence(cfg, fourier, N, wav, M);

  // blocks against an explicit matrix
  Eigen::MatrixXcd U(256, 256);
  for (int r = 0; r < 256; ++r)
    for (int c = 0; c < 256; ++c)
      U(r, c) = inner_product_sep(cfg, wav[static_cast<std::size_t>(c)], fourier[static_cast<std::size_t>(r)]);
  auto const ref = local_coherence(U, N, M);
  for (int k = 0; k < 5; ++k)
    for (int l = 0; l < 5; ++l)
      CHECK(loc.block_sup(k, l) == doctest::Approx(ref.block_sup(k, l)).epsilon(1e-12));

  // semi-infinite row factor covers every scale, so it dominates the finite one
  for (int k = 0; k < 5; ++k)
    CHECK(loc.row_sup[static_cast<std::size_t>(k)] >= ref.row_sup[static_cast<std::size_t>(k)] - 1e-15);

  // mu(k, l) <= sqrt(min(suffix_N, wavelet suffix_M) * suffix_N) at the level starts
  auto const fprof = row_profile(cfg, fourier, WaveletKind::separable);
  auto const wprof = wavelet_row_profile(cfg, wav);
  for (int k = 0; k < 5; ++k)
    for (int l = 0; l < 5; ++l)
    {
      double const a = fprof.suffix[static_cast<std::size_t>(k == 0 ? 0 : N[static_cast<std::size_t>(k - 1)])];
      double const b = wprof.suffix[static_cast<std::size_t>(l == 0 ? 0 : M[static_cast<std::size_t>(l - 1)])];
      CHECK(loc.mu(k, l) >= 0.0);
      CHECK(loc.mu(k, l) <= std::sqrt(std::min(a, b) * a) + 1e-12);
    }

  // far rows see little of the coarse columns
  CHECK(loc.mu(4, 0) < loc.mu(0, 0));
  CHECK(loc.mu(4, 0) < loc.mu(4, 4));
}

TEST_CASE("decay fits on synthetic profiles")
{
  CoherenceProfile p;
  for (int N = 1; N <= 20000; ++N)
    p.row.push_back(1.0 / N);
  p.finalize();
  auto const f = fit_decay(p, {DecayModel::Kind::pow, 1.0, 1});
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(f.band_ratio() == doctest::Approx(1.0).epsilon(1e-9));

  CoherenceProfile q;
  for (int N = 1; N <= 20000; ++N)
    q.row.push_back(std::log(N + 1.0) / N);
  q.finalize();
  auto const g = fit_decay(q, {DecayModel::Kind::pow_log, 1.0, 2});
  CHECK(g.band_ratio() < 1.1);

  CoherenceProfile z;
  z.row.assign(2000, 0.0);
  z.finalize();
  CHECK_THROWS_AS(fit_decay(z, {}), Error);
  CoherenceProfile s;
  s.row.assign(100, 1.0);
  s.finalize();
  CHECK_THROWS_AS(fit_decay(s, {}), Error);
}

TEST_CASE("hyperbolic ordering on the separable basis: diagonal witnesses")
{
  auto const cfg = haar(2);
  auto const cons = ConsistencyFn::hyperbolic_z(2);
  long long const H = 20000;
  auto const prefix = lattice_prefix(cons, H);
  auto const prof = row_profile(cfg, prefix, WaveletKind::separable);
  // diagonal frequency (t, t) just past rank N
  std::vector<double> c;
  for (long long N = 100; N <= H; N = N * 3 / 2)
  {
    double const K = eval_consistency(cons, prefix[static_cast<std::size_t>(N - 1)]);
    long const t = static_cast<long>(std::floor(std::sqrt(K))) + 1;
    IntPoint const diag{t, t};
    double const mu = frequency_coherence(cfg, diag, WaveletKind::separable);
    if (static_cast<double>(t * t) <= eval_consistency(cons, prefix.back()))
      CHECK(mu <= prof.suffix[static_cast<std::size_t>(N - 1)] + 1e-15);
    c.push_back(mu * h_d(static_cast<double>(N), 2));
  }
  double const lo = *std::min_element(c.begin(), c.end());
  double const hi = *std::max_element(c.begin(), c.end());
  CHECK(lo > 0.0);
  CHECK(hi / lo < 20.0);
}
