#include "cohere/legendre.hpp"

#include "cohere/error.hpp"

#include <cmath>
#include <numbers>

namespace cohere
{
namespace
{
constexpr double pi = std::numbers::pi;

QuadratureRule const& rule20()
{
  static QuadratureRule const r = gauss_legendre(20);
  return r;
}

template <class F>
cplx gl_segment(F const& f, double a, double b)
{
  auto const& r = rule20();
  double const mid = 0.5 * (a + b), half = 0.5 * (b - a);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    acc += r.weights[i] * f(mid + half * r.nodes[i]);
  return acc * half;
}

template <class F>
cplx adaptive(F const& f, double a, double b, cplx whole, double tol, int depth)
{
  double const mid = 0.5 * (a + b);
  cplx const left = gl_segment(f, a, mid);
  cplx const right = gl_segment(f, mid, b);
  if (std::abs(left + right - whole) <= tol || depth >= 40)
    return left + right;
  return adaptive(f, a, mid, left, 0.5 * tol, depth + 1) +
         adaptive(f, mid, b, right, 0.5 * tol, depth + 1);
}

} // namespace

QuadratureRule gauss_legendre(int n)
{
  require(n >= 1, ErrorCode::invalid_argument, "gauss_legendre: n must be >= 1");
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i)
  {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l)
      {
        double const p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double const dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    double const w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

double legendre_normalized(long n, double x)
{
  require(n >= 1, ErrorCode::invalid_argument, "legendre_normalized: n must be >= 1");
  long const deg = n - 1;
  double p0 = 1.0, p1 = x;
  if (deg == 0)
    return std::sqrt(0.5);
  for (long l = 2; l <= deg; ++l)
  {
    double const p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / static_cast<double>(l);
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt(static_cast<double>(n) - 0.5) * p1;
}

cplx legendre_fourier_coeff(LegendreIndex n, long k, double eps, double tol)
{
  require(n.n >= 1, ErrorCode::invalid_argument, "legendre_fourier_coeff: n must be >= 1");
  require(eps > 0.0 && eps <= 0.45 + 1e-12, ErrorCode::invalid_argument,
          "legendre_fourier_coeff: eps must lie in (0, 0.45]");
  double const a = 2.0 * pi * eps * static_cast<double>(k);
  auto f = [&](double x) { return legendre_normalized(n.n, x) * std::polar(1.0, -a * x); };

  // Start from enough panels that each holds only a few oscillations.
  double const osc = std::abs(a) / pi + static_cast<double>(n.n);
  int const panels = std::max(1, static_cast<int>(std::ceil(osc / 8.0)));
  cplx acc = 0.0;
  for (int i = 0; i < panels; ++i)
  {
    double const lo = -1.0 + 2.0 * i / panels, hi = -1.0 + 2.0 * (i + 1) / panels;
    acc += adaptive(f, lo, hi, gl_segment(f, lo, hi), tol / panels, 0);
  }
  return std::sqrt(eps) * acc;
}

int bessel_cutoff(double x)
{
  x = std::abs(x);
  return static_cast<int>(x + 40.0 + 10.0 * std::cbrt(x));
}

std::vector<double> spherical_bessel_sequence(double x, int lmax)
{
  require(lmax >= 0, ErrorCode::invalid_argument, "spherical_bessel_sequence: lmax must be >= 0");
  x = std::abs(x);
  std::vector<double> out(static_cast<std::size_t>(lmax) + 1, 0.0);
  if (x == 0.0)
  {
    out[0] = 1.0;
    return out;
  }
  int const start = std::max(lmax, bessel_cutoff(x)) + 1;
  std::vector<double> tmp(static_cast<std::size_t>(start) + 2, 0.0);
  tmp[static_cast<std::size_t>(start) + 1] = 0.0;
  tmp[static_cast<std::size_t>(start)] = 1e-300;
  for (int l = start; l >= 1; --l)
  {
    auto const ul = static_cast<std::size_t>(l);
    tmp[ul - 1] = (2.0 * l + 1.0) / x * tmp[ul] - tmp[ul + 1];
    if (std::abs(tmp[ul - 1]) > 1e250)
    {
      for (std::size_t m = ul - 1; m < tmp.size(); ++m)
        tmp[m] *= 1e-250;
    }
  }
  // sum (2l+1) j_l^2 = 1
  long double norm = 0.0L;
  for (std::size_t l = 0; l < tmp.size(); ++l)
    norm += (2.0L * l + 1.0L) * static_cast<long double>(tmp[l]) * tmp[l];
  long double const scale = 1.0L / std::sqrt(norm);
  for (int l = 0; l <= lmax; ++l)
    out[static_cast<std::size_t>(l)] = static_cast<double>(tmp[static_cast<std::size_t>(l)] * scale);
  return out;
}

cplx legendre_fourier_coeff_bessel(LegendreIndex n, long k, double eps)
{
  require(n.n >= 1, ErrorCode::invalid_argument, "legendre_fourier_coeff_bessel: n must be >= 1");
  double const a = 2.0 * pi * eps * static_cast<double>(k);
  int const l = static_cast<int>(n.n - 1);
  double jl = spherical_bessel_sequence(a, l)[static_cast<std::size_t>(l)];
  // j_l(-a) = (-1)^l j_l(a)
  if (a < 0.0 && (l % 2 == 1))
    jl = -jl;
  static cplx const minus_i_pow[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
  return 2.0 * std::sqrt(eps) * std::sqrt(static_cast<double>(n.n) - 0.5) * jl *
         minus_i_pow[l % 4];
}

double legendre_frequency_coherence(long k, double eps)
{
  double const a = 2.0 * pi * eps * static_cast<double>(k);
  int const lmax = bessel_cutoff(a);
  auto const j = spherical_bessel_sequence(a, lmax);
  double best = 0.0;
  for (int l = 0; l <= lmax; ++l)
  {
    double const v = 4.0 * eps * (l + 0.5) * j[static_cast<std::size_t>(l)] * j[static_cast<std::size_t>(l)];
    best = std::max(best, v);
  }
  return best;
}

} // namespace cohere
