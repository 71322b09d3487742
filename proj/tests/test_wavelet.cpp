#include "cohere/error.hpp"
#include "cohere/wavelet.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cohere;
using std::numbers::pi;

namespace
{
// Haar closed forms written out independently of the library.
cplx haar_phi(double w)
{
  if (w == 0.0)
    return 1.0;
  cplx const i(0.0, 1.0);
  return (std::exp(2.0 * pi * i * w) - 1.0) / (2.0 * pi * i * w);
}

double haar_psi_mag(double w)
{
  if (w == 0.0)
    return 0.0;
  double const s = std::sin(pi * w / 2.0);
  return std::abs(s * s / (pi * w / 2.0));
}
} // namespace

TEST_CASE("filters: sum, orthonormality, Haar")
{
  auto const haar = build_family(1);
  REQUIRE(haar.h.size() == 2);
  CHECK(haar.h[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(haar.h[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  for (int p = 1; p <= 10; ++p)
  {
    CAPTURE(p);
    auto const fam = build_family(p);
    REQUIRE(fam.h.size() == static_cast<std::size_t>(2 * p));
    double sum = 0.0;
    for (double v : fam.h)
      sum += v;
    CHECK(std::abs(sum - std::sqrt(2.0)) < 1e-12);
    int const L = 2 * p;
    for (int m = 0; 2 * m < L; ++m)
    {
      double acc = 0.0;
      for (int k = 0; k + 2 * m < L; ++k)
        acc += fam.h[static_cast<std::size_t>(k)] * fam.h[static_cast<std::size_t>(k + 2 * m)];
      CHECK(std::abs(acc - (m == 0 ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("filters: D4 matches the textbook coefficients up to reversal")
{
  double const r3 = std::sqrt(3.0), n = 4.0 * std::sqrt(2.0);
  std::vector<double> const d4 = {(1 + r3) / n, (3 + r3) / n, (3 - r3) / n, (1 - r3) / n};
  auto const fam = build_family(2);
  bool fwd = true, rev = true;
  for (std::size_t i = 0; i < 4; ++i)
  {
    fwd = fwd && std::abs(fam.h[i] - d4[i]) < 1e-12;
    rev = rev && std::abs(fam.h[i] - d4[3 - i]) < 1e-12;
  }
  CHECK((fwd || rev));
}

TEST_CASE("filters: out of range p")
{
  for (int p : {0, -1, 11})
  {
    try
    {
      build_family(p);
      FAIL("expected an error");
    }
    catch (Error const& e)
    {
      CHECK(e.code() == ErrorCode::unsupported_family);
    }
  }
}

TEST_CASE("Fourier transform: Haar point values")
{
  auto const haar = build_family(1);
  CHECK(std::abs(ft_scaling(haar, 0.0) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(ft_scaling(haar, 1.0)) < 1e-14);
  CHECK(std::abs(ft_scaling(haar, 0.5)) == doctest::Approx(2.0 / pi).epsilon(1e-12));
  CHECK(std::abs(ft_wavelet(haar, 0.0)) < 1e-15);
  CHECK(std::abs(ft_wavelet(haar, 0.5)) == doctest::Approx(2.0 / pi).epsilon(1e-12));
  CHECK(std::abs(ft_wavelet(build_family(2), 0.0)) < 1e-12);

  // magnitudes against the hand-written closed forms
  for (double w : {-7.3, -1.25, 0.01, 0.3, 2.5, 11.0})
  {
    CHECK(std::abs(ft_scaling(haar, w)) == doctest::Approx(std::abs(haar_phi(w))).epsilon(1e-12));
    CHECK(std::abs(ft_wavelet(haar, w)) == doctest::Approx(haar_psi_mag(w)).epsilon(1e-10));
  }
}

TEST_CASE("Fourier transform: product form agrees with Haar closed form")
{
  auto const haar = build_family(1);
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i)
  {
    double const w = -50.0 + 0.05 * i;
    worst = std::max(worst, std::abs(ft_scaling_product(haar, w) - ft_scaling(haar, w)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("Fourier transform: bounded by one and two-scale relation")
{
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-200.0, 200.0);
  for (int p : {1, 2, 3, 5, 8})
  {
    CAPTURE(p);
    auto const fam = build_family(p);
    for (int t = 0; t < 300; ++t)
    {
      double const w = U(rng);
      CHECK(std::abs(ft_scaling(fam, w)) <= 1.0 + 1e-12);
      CHECK(std::abs(ft_wavelet(fam, w)) <= 1.0 + 1e-12);
      double const lhs = std::abs(ft_wavelet(fam, 2.0 * w));
      double const rhs = std::abs(lowpass_symbol(fam, w + 0.5)) * std::abs(ft_scaling(fam, w));
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("Fourier transform: Parseval on [-64, 64]")
{
  for (int p : {1, 2, 4})
  {
    CAPTURE(p);
    auto const fam = build_family(p);
    double const B = 64.0, dw = 1.0 / 256.0;
    long const steps = static_cast<long>(2.0 * B / dw);
    double acc = 0.0;
    for (long i = 0; i <= steps; ++i)
    {
      double const w = -B + dw * static_cast<double>(i);
      double const v = std::norm(ft_scaling(fam, w));
      acc += (i == 0 || i == steps) ? 0.5 * v : v;
    }
    acc *= dw;
    CHECK(acc == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("decay constants")
{
  auto const haar = build_family(1);
  auto const g1 = log_grid(0.1, 100.0, 2000);
  auto const c1 = check_decay(haar, 1.0, g1);
  CHECK(c1.constant <= 1.0 / pi + 1e-3);
  CHECK(c1.plateau);

  auto const g2 = log_grid(0.1, 1e4, 4000);
  auto const c2 = check_decay(haar, 1.5, g2);
  CHECK_FALSE(c2.plateau);
  CHECK(c2.constant > 10.0);

  auto const c3 = check_decay(build_family(3), 1e-6, g1);
  CHECK(c3.constant <= 1.0 + 1e-3);

  std::vector<double> empty;
  CHECK_THROWS_AS(check_decay(haar, 1.0, empty), Error);
  std::vector<double> with_zero = {0.0, 1.0};
  CHECK_THROWS_AS(check_decay(haar, 1.0, with_zero), Error);
}

TEST_CASE("band infimum")
{
  auto const haar = build_family(1);
  double const L1 = band_infimum(haar, 1);
  // grid minimum of the closed form on [1/4, 1/2]
  double ref = 1e9;
  for (int i = 0; i <= 20000; ++i)
    ref = std::min(ref, haar_psi_mag(0.25 + 0.25 * i / 20000.0));
  CHECK(L1 > 0.0);
  CHECK(L1 == doctest::Approx(ref).epsilon(1e-4));
  for (int q = 0; q < 8; ++q)
    CHECK(band_infimum(haar, q) > 0.0);
  CHECK(band_infimum(build_family(2), 2) >= 0.0);
  CHECK_THROWS_AS(band_infimum(haar, -1), Error);
}
