#include "cohere/wavelet.hpp"

#include "cohere/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/Polynomials>

namespace cohere
{
namespace
{
constexpr double pi = std::numbers::pi;

double binomial(int n, int k)
{
  double r = 1.0;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

// Roots of P(y) = sum_{k<p} C(p-1+k, k) y^k, polished by Newton.
std::vector<cplx> daubechies_y_roots(int p)
{
  int const deg = p - 1;
  if (deg == 0)
    return {};
  Eigen::VectorXd coeffs(deg + 1);
  for (int k = 0; k <= deg; ++k)
    coeffs[k] = binomial(p - 1 + k, k);

  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(coeffs);
  std::vector<cplx> roots;
  for (auto const& r : solver.roots())
    roots.push_back(r);

  for (auto& y : roots)
  {
    for (int it = 0; it < 8; ++it)
    {
      cplx val = 0.0, der = 0.0;
      for (int k = deg; k >= 0; --k)
      {
        der = der * y + val;
        val = val * y + coeffs[k];
      }
      if (std::abs(der) == 0.0)
        break;
      y -= val / der;
    }
  }
  return roots;
}

cplx haar_scaling(double omega)
{
  if (omega == 0.0)
    return 1.0;
  double const x = pi * omega;
  return std::polar(std::sin(x) / x, -x);
}

cplx haar_wavelet(double omega)
{
  if (omega == 0.0)
    return 0.0;
  double const half = pi * omega / 2.0;
  double const sn = std::sin(half);
  // 2i e^{-i pi w} sin^2(pi w / 2) / (pi w)
  return cplx(0.0, 1.0) * std::polar(sn * sn / half, -pi * omega);
}

int product_terms(double omega, FtEvalConfig const& cfg)
{
  double const a = std::abs(omega);
  int terms = 20;
  if (a > 0.0)
    terms = std::max(terms, static_cast<int>(std::ceil(std::log2(a / cfg.product_tolerance))));
  return std::min(terms, cfg.max_product_terms);
}

DecayCheck decay_sup(std::span<double const> grid, double alpha, auto&& magnitude)
{
  require(!grid.empty(), ErrorCode::invalid_argument, "check_decay: empty frequency grid");
  require(alpha > 0.0, ErrorCode::invalid_argument, "check_decay: alpha must be positive");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  require(std::abs(sorted.front()) > 0.0, ErrorCode::invalid_argument,
          "check_decay: grid must exclude 0");

  DecayCheck out;
  std::size_t const half = (sorted.size() + 1) / 2;
  for (std::size_t i = 0; i < sorted.size(); ++i)
  {
    double const w = sorted[i];
    double const v = magnitude(w) * std::pow(std::abs(w), alpha);
    out.constant = std::max(out.constant, v);
    if (i < half)
      out.lower_half = std::max(out.lower_half, v);
  }
  out.plateau = out.constant <= 1.5 * out.lower_half;
  return out;
}

} // namespace

const char* to_string(ErrorCode code)
{
  switch (code)
  {
  case ErrorCode::invalid_argument: return "invalid-argument";
  case ErrorCode::unsupported_family: return "unsupported-family";
  case ErrorCode::capacity: return "capacity";
  case ErrorCode::type_mismatch: return "type-mismatch";
  case ErrorCode::config: return "config";
  case ErrorCode::numerical: return "numerical";
  case ErrorCode::non_convergence: return "non-convergence";
  case ErrorCode::io: return "io";
  }
  return "unknown";
}

void FtEvalConfig::validate() const
{
  require(product_tolerance > 0.0, ErrorCode::invalid_argument,
          "FtEvalConfig: product_tolerance must be positive");
  require(max_product_terms >= 20, ErrorCode::invalid_argument,
          "FtEvalConfig: max_product_terms must be >= 20");
}

WaveletFamily build_family(int p)
{
  if (p < 1 || p > 10)
    fail(ErrorCode::unsupported_family,
         "Daubechies family with p=" + std::to_string(p) + " is not supported (1 <= p <= 10)");

  WaveletFamily fam;
  fam.p = p;
  if (p == 1)
  {
    fam.h = {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
    return fam;
  }

  // H(w) = c (1 + w)^p prod_i (w - z_i), |z_i| > 1 (minimum phase).
  std::vector<cplx> poly{1.0};
  auto multiply = [&poly](cplx root_shift, cplx lead) {
    std::vector<cplx> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i)
    {
      next[i] += poly[i] * root_shift;
      next[i + 1] += poly[i] * lead;
    }
    poly = std::move(next);
  };
  for (int i = 0; i < p; ++i)
    multiply(1.0, 1.0);
  for (cplx y : daubechies_y_roots(p))
  {
    cplx const b = 2.0 - 4.0 * y;
    cplx const disc = std::sqrt(b * b - 4.0);
    cplx z = (b + disc) / 2.0;
    if (std::abs(z) < 1.0)
      z = 1.0 / z;
    multiply(-z, 1.0);
  }

  double sum = 0.0;
  for (auto const& c : poly)
    sum += c.real();
  fam.h.resize(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i)
    fam.h[i] = poly[i].real() * std::numbers::sqrt2 / sum;
  return fam;
}

cplx lowpass_symbol(WaveletFamily const& fam, double xi)
{
  cplx const step = std::polar(1.0, -2.0 * pi * xi);
  cplx rot = std::polar(1.0, -2.0 * pi * xi * fam.first_shift());
  cplx acc = 0.0;
  for (double hk : fam.h)
  {
    acc += hk * rot;
    rot *= step;
  }
  return acc / std::numbers::sqrt2;
}

cplx highpass_symbol(WaveletFamily const& fam, double xi)
{
  // g_k = (-1)^k h_{1-k}, k in [-p+1, p]
  int const lo = fam.first_shift();
  cplx acc = 0.0;
  for (int k = lo; k <= fam.p; ++k)
  {
    double const hk = fam.h[static_cast<std::size_t>(1 - k - lo)];
    double const g = (k % 2 == 0) ? hk : -hk;
    acc += g * std::polar(1.0, -2.0 * pi * xi * k);
  }
  return acc / std::numbers::sqrt2;
}

cplx ft_scaling_product(WaveletFamily const& fam, double omega, FtEvalConfig const& cfg)
{
  int const terms = product_terms(omega, cfg);
  cplx acc = 1.0;
  double xi = omega;
  for (int j = 1; j <= terms; ++j)
  {
    xi *= 0.5;
    acc *= lowpass_symbol(fam, xi);
  }
  return acc;
}

cplx ft_wavelet_product(WaveletFamily const& fam, double omega, FtEvalConfig const& cfg)
{
  return highpass_symbol(fam, omega / 2.0) * ft_scaling_product(fam, omega / 2.0, cfg);
}

cplx ft_scaling(WaveletFamily const& fam, double omega, FtEvalConfig const& cfg)
{
  if (fam.is_haar())
    return haar_scaling(omega);
  return ft_scaling_product(fam, omega, cfg);
}

cplx ft_wavelet(WaveletFamily const& fam, double omega, FtEvalConfig const& cfg)
{
  if (fam.is_haar())
    return haar_wavelet(omega);
  return ft_wavelet_product(fam, omega, cfg);
}

double ft_power(WaveletFamily const& fam, int s, double omega, FtEvalConfig const& cfg)
{
  if (fam.is_haar())
  {
    if (s == 0)
    {
      if (omega == 0.0)
        return 1.0;
      double const x = pi * omega;
      double const v = std::sin(x) / x;
      return v * v;
    }
    if (omega == 0.0)
      return 0.0;
    double const half = pi * omega / 2.0;
    double const sn = std::sin(half);
    double const v = sn * sn / half;
    return v * v;
  }
  return std::norm(s == 0 ? ft_scaling(fam, omega, cfg) : ft_wavelet(fam, omega, cfg));
}

DecayCheck check_decay(WaveletFamily const& fam, double alpha, std::span<double const> grid,
                       FtEvalConfig const& cfg)
{
  return decay_sup(grid, alpha, [&](double w) { return std::abs(ft_scaling(fam, w, cfg)); });
}

DecayCheck check_decay_wavelet(WaveletFamily const& fam, double alpha,
                               std::span<double const> grid, FtEvalConfig const& cfg)
{
  return decay_sup(grid, alpha, [&](double w) { return std::abs(ft_wavelet(fam, w, cfg)); });
}

double band_infimum(WaveletFamily const& fam, int q, int grid_points, FtEvalConfig const& cfg)
{
  require(q >= 0, ErrorCode::invalid_argument, "band_infimum: q must be >= 0");
  grid_points = std::max(grid_points, 1024);
  double const lo = std::ldexp(1.0, -(q + 1));
  double const hi = std::ldexp(1.0, -q);
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i)
  {
    double const w = lo + (hi - lo) * i / (grid_points - 1);
    inf = std::min(inf, std::abs(ft_wavelet(fam, w, cfg)));
  }
  return inf;
}

std::vector<double> log_grid(double lo, double hi, int points)
{
  require(lo > 0.0 && hi > lo && points >= 2, ErrorCode::invalid_argument,
          "log_grid: need 0 < lo < hi and at least two points");
  std::vector<double> out(static_cast<std::size_t>(points));
  double const a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i)
    out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
  return out;
}

} // namespace cohere
