#include "cohere/coherence.hpp"

#include "cohere/error.hpp"
#include "cohere/legendre.hpp"
#include "cohere/parallel.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <unordered_set>

namespace cohere
{
namespace
{
constexpr int max_scan_levels = 200;

// sup over s != 0 (s = 0 allowed when allow_zero) of prod_i P[s_i][i].
double best_type_product(std::array<std::array<double, max_dim>, 2> const& P, int d, bool allow_zero)
{
  double best = 0.0;
  for (unsigned s = allow_zero ? 0u : 1u; s < (1u << d); ++s)
  {
    double prod = 1.0;
    for (int i = 0; i < d; ++i)
      prod *= P[(s >> i) & 1u][static_cast<std::size_t>(i)];
    best = std::max(best, prod);
  }
  return best;
}

double separable_level_value(BasisConfig const& cfg, FourierIndex const& n, int j)
{
  std::array<std::array<double, max_dim>, 2> P{};
  double const scale = cfg.eps * std::ldexp(1.0, -j);
  for (int i = 0; i < cfg.d; ++i)
  {
    double const w = scale * static_cast<double>(n[i]);
    P[0][static_cast<std::size_t>(i)] = ft_power(cfg.fam, 0, w, cfg.ft);
    P[1][static_cast<std::size_t>(i)] = ft_power(cfg.fam, 1, w, cfg.ft);
  }
  double const env = std::pow(cfg.eps * std::ldexp(1.0, -j), cfg.d);
  return env * best_type_product(P, cfg.d, j == cfg.J);
}

double separable_coherence(BasisConfig const& cfg, FourierIndex const& n)
{
  double best = 0.0;
  for (int j = cfg.J; j < cfg.J + max_scan_levels; ++j)
  {
    double const env = std::pow(cfg.eps * std::ldexp(1.0, -j), cfg.d);
    if (env <= best)
      break;
    best = std::max(best, separable_level_value(cfg, n, j));
  }
  return best;
}

BasisConfig axis_config(BasisConfig const& cfg)
{
  BasisConfig one = cfg;
  one.d = 1;
  return one;
}

double axis_coherence(BasisConfig const& one, long n)
{
  IntPoint p{n};
  return separable_coherence(one, p);
}

double tensor_coherence(BasisConfig const& cfg, FourierIndex const& n)
{
  BasisConfig const one = axis_config(cfg);
  double v = 1.0;
  for (int i = 0; i < cfg.d; ++i)
    v *= axis_coherence(one, n[i]);
  return v;
}

// Largest |F^s(eps 2^{-j} n)|^2 over |n| <= R, and whether it sits at |n| = R.
struct AxisSup
{
  double value = 0.0;
  bool on_boundary = false;
};

AxisSup axis_frequency_sup(BasisConfig const& cfg, int s, int j, double multiplier)
{
  long const R = std::max<long>(1, static_cast<long>(std::ceil(multiplier * std::ldexp(1.0, j))));
  double const scale = cfg.eps * std::ldexp(1.0, -j);
  AxisSup out;
  long arg = 0;
  for (long n = 0; n <= R; ++n)
  {
    double const v = ft_power(cfg.fam, s, scale * static_cast<double>(n), cfg.ft);
    if (v > out.value)
    {
      out.value = v;
      arg = n;
    }
  }
  out.on_boundary = arg == R;
  return out;
}

} // namespace

void CoherenceProfile::finalize()
{
  horizon = static_cast<long long>(row.size());
  suffix.assign(row.size(), 0.0);
  double run = 0.0;
  for (std::size_t i = row.size(); i-- > 0;)
  {
    run = std::max(run, row[i]);
    suffix[i] = run;
  }
  certified = 0;
  while (certified < horizon && suffix[static_cast<std::size_t>(certified)] >= tail_bound)
    ++certified;
}

double frequency_coherence(BasisConfig const& cfg, FourierIndex const& n, WaveletKind kind)
{
  require(n.d == cfg.d, ErrorCode::invalid_argument, "frequency_coherence: dimension mismatch");
  return kind == WaveletKind::separable ? separable_coherence(cfg, n) : tensor_coherence(cfg, n);
}

double frequency_coherence_bruteforce(BasisConfig const& cfg, FourierIndex const& n, WaveletKind kind,
                                      int jmax)
{
  require(n.d == cfg.d, ErrorCode::invalid_argument, "frequency_coherence_bruteforce: dimension mismatch");
  if (kind == WaveletKind::separable)
  {
    double best = 0.0;
    for (int j = cfg.J; j <= jmax; ++j)
      best = std::max(best, separable_level_value(cfg, n, j));
    return best;
  }
  BasisConfig const one = axis_config(cfg);
  double v = 1.0;
  for (int i = 0; i < cfg.d; ++i)
  {
    IntPoint p{n[i]};
    double best = 0.0;
    for (int j = cfg.J; j <= jmax; ++j)
      best = std::max(best, separable_level_value(one, p, j));
    v *= best;
  }
  return v;
}

double decay_constant(WaveletFamily const& fam, FtEvalConfig const& ft)
{
  if (fam.is_haar())
    return 2.0 / std::numbers::pi;
  auto const grid = log_grid(1e-3, 1e4, 4000);
  double const k0 = check_decay(fam, 1.0, grid, ft).constant;
  double const k1 = check_decay_wavelet(fam, 1.0, grid, ft).constant;
  return 1.05 * std::max(k0, k1);
}

double min_hyperbolic_outside(std::vector<IntPoint> const& prefix)
{
  require(!prefix.empty(), ErrorCode::invalid_argument, "min_hyperbolic_outside: empty prefix");
  int const d = prefix.front().d;
  std::unordered_set<IntPoint, IntPointHash> in(prefix.begin(), prefix.end());
  ConsistencyFn const hyp = ConsistencyFn::hyperbolic_z(d);
  for (long t = 1;; t *= 2)
  {
    double best = std::numeric_limits<double>::infinity();
    for_each_sublevel(hyp, static_cast<double>(t), [&](IntPoint const& n) {
      if (!in.count(n))
        best = std::min(best, semi_hyperbolic_value(n, d));
    });
    if (std::isfinite(best))
      return best;
    require(t < (1L << 40), ErrorCode::capacity, "min_hyperbolic_outside: search diverged");
  }
}

CoherenceProfile row_profile(BasisConfig const& cfg, std::vector<IntPoint> const& prefix, WaveletKind kind,
                             int threads)
{
  cfg.validate();
  require(!prefix.empty(), ErrorCode::invalid_argument, "row_profile: empty prefix");
  require(static_cast<long long>(prefix.size()) <= cfg.budget, ErrorCode::capacity,
          "row_profile: horizon exceeds the budget");
  CoherenceProfile prof;
  prof.row.assign(prefix.size(), 0.0);

  if (kind == WaveletKind::tensor)
  {
    long maxabs = 0;
    for (auto const& n : prefix)
      maxabs = std::max(maxabs, n.max_abs());
    BasisConfig const one = axis_config(cfg);
    std::vector<double> axis(static_cast<std::size_t>(maxabs) + 1);
    parallel_for(axis.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        axis[i] = axis_coherence(one, static_cast<long>(i));
    });
    parallel_for(prefix.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r)
      {
        double v = 1.0;
        for (int i = 0; i < cfg.d; ++i)
          v *= axis[static_cast<std::size_t>(std::abs(prefix[r][i]))];
        prof.row[r] = v;
      }
    });
  }
  else
  {
    parallel_for(prefix.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r)
        prof.row[r] = separable_coherence(cfg, prefix[r]);
    });
  }
  double const K = std::max(decay_constant(cfg.fam, cfg.ft), 1.0);
  prof.tail_bound = std::min(1.0, std::pow(K, cfg.d) / min_hyperbolic_outside(prefix));
  prof.finalize();
  return prof;
}

CoherenceProfile legendre_row_profile(double eps, std::vector<IntPoint> const& prefix, int threads)
{
  require(eps > 0.0 && eps <= 0.45 + 1e-12, ErrorCode::invalid_argument,
          "legendre_row_profile: eps must lie in (0, 0.45]");
  require(!prefix.empty() && prefix.front().d == 1, ErrorCode::invalid_argument,
          "legendre_row_profile: needs a one-dimensional prefix");
  CoherenceProfile prof;
  prof.row.assign(prefix.size(), 0.0);
  parallel_for(prefix.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r)
      prof.row[r] = legendre_frequency_coherence(prefix[r][0], eps);
  });
  // Landau: |J_nu(x)| <= 0.6749 nu^{-1/3}; valid for degrees below 2x, beyond which j_l decays.
  double const kmin = min_hyperbolic_outside(prefix);
  double const x = 2.0 * std::numbers::pi * eps * kmin;
  double const c = 0.6749;
  prof.tail_bound = std::min(1.0, 4.0 * eps * (std::numbers::pi * c * c / 2.0) * std::cbrt(2.0 * x) / x);
  prof.finalize();
  return prof;
}

CoherenceProfile wavelet_row_profile(BasisConfig const& cfg, std::vector<SeparableWaveletIndex> const& prefix,
                                     WaveletRowOptions const& opt)
{
  cfg.validate();
  require(!prefix.empty(), ErrorCode::invalid_argument, "wavelet_row_profile: empty prefix");
  require(opt.radius_multiplier > 0.0, ErrorCode::invalid_argument,
          "wavelet_row_profile: radius multiplier must be positive");
  std::map<std::pair<int, int>, AxisSup> cache;
  auto sup = [&](int s, int j) -> AxisSup const& {
    auto key = std::make_pair(s, j);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, axis_frequency_sup(cfg, s, j, opt.radius_multiplier)).first;
    return it->second;
  };

  CoherenceProfile prof;
  prof.row.reserve(prefix.size());
  for (auto const& w : prefix)
  {
    require(is_valid(cfg, w), ErrorCode::invalid_argument, "wavelet_row_profile: invalid wavelet index");
    double v = std::pow(cfg.eps * std::ldexp(1.0, -w.j), cfg.d);
    for (int i = 0; i < cfg.d; ++i)
    {
      AxisSup const& a = sup(static_cast<int>((w.s >> i) & 1u), w.j);
      v *= a.value;
      prof.boundary_attained = prof.boundary_attained || a.on_boundary;
    }
    prof.row.push_back(v);
  }
  if (opt.strict && prof.boundary_attained)
    fail(ErrorCode::numerical, "wavelet_row_profile: supremum attained on the frequency scan boundary");
  // Elements past the prefix live at level >= the last enumerated level.
  prof.tail_bound = std::pow(cfg.eps * std::ldexp(1.0, -prefix.back().j), cfg.d);
  prof.finalize();
  return prof;
}

CoherenceProfile wavelet_row_profile(BasisConfig const& cfg, std::vector<TensorWaveletIndex> const& prefix,
                                     WaveletRowOptions const& opt)
{
  cfg.validate();
  require(!prefix.empty(), ErrorCode::invalid_argument, "wavelet_row_profile: empty prefix");
  require(opt.radius_multiplier > 0.0, ErrorCode::invalid_argument,
          "wavelet_row_profile: radius multiplier must be positive");
  std::map<std::pair<int, int>, AxisSup> cache;
  CoherenceProfile prof;
  prof.row.reserve(prefix.size());
  for (auto const& w : prefix)
  {
    require(is_valid(cfg, w), ErrorCode::invalid_argument, "wavelet_row_profile: invalid wavelet index");
    double v = std::pow(cfg.eps, cfg.d);
    for (int i = 0; i < cfg.d; ++i)
    {
      int const s = static_cast<int>((w.s >> i) & 1u);
      int const j = w.j[static_cast<std::size_t>(i)];
      auto key = std::make_pair(s, j);
      auto it = cache.find(key);
      if (it == cache.end())
        it = cache.emplace(key, axis_frequency_sup(cfg, s, j, opt.radius_multiplier)).first;
      v *= std::ldexp(1.0, -j) * it->second.value;
      prof.boundary_attained = prof.boundary_attained || it->second.on_boundary;
    }
    prof.row.push_back(v);
  }
  if (opt.strict && prof.boundary_attained)
    fail(ErrorCode::numerical, "wavelet_row_profile: supremum attained on the frequency scan boundary");
  prof.tail_bound = std::pow(cfg.eps, cfg.d) * std::ldexp(1.0, -prefix.back().scale_sum());
  prof.finalize();
  return prof;
}

namespace
{
void check_levels(std::vector<long long> const& levels, long long available, char const* what)
{
  require(!levels.empty(), ErrorCode::invalid_argument, std::string("local_coherence: empty ") + what);
  long long prev = 0;
  for (long long b : levels)
  {
    require(b > prev, ErrorCode::invalid_argument,
            std::string("local_coherence: ") + what + " must be strictly increasing and positive");
    prev = b;
  }
  require(levels.back() <= available, ErrorCode::capacity,
          std::string("local_coherence: ") + what + " exceed the enumerated horizon");
}

void assemble(LocalCoherenceMatrix& out)
{
  auto const r = static_cast<Eigen::Index>(out.levels_n.size());
  auto const c = static_cast<Eigen::Index>(out.levels_m.size());
  out.mu.resize(r, c);
  for (Eigen::Index k = 0; k < r; ++k)
    for (Eigen::Index l = 0; l < c; ++l)
      out.mu(k, l) = std::sqrt(out.block_sup(k, l) * out.row_sup[static_cast<std::size_t>(k)]);
}

} // namespace

LocalCoherenceMatrix local_coherence(Eigen::MatrixXcd const& U, std::vector<long long> const& levels_n,
                                     std::vector<long long> const& levels_m)
{
  check_levels(levels_n, U.rows(), "sampling levels");
  check_levels(levels_m, U.cols(), "sparsity levels");
  LocalCoherenceMatrix out;
  out.levels_n = levels_n;
  out.levels_m = levels_m;
  auto const r = static_cast<Eigen::Index>(levels_n.size());
  auto const c = static_cast<Eigen::Index>(levels_m.size());
  out.block_sup = Eigen::MatrixXd::Zero(r, c);
  out.row_sup.assign(static_cast<std::size_t>(r), 0.0);
  long long n0 = 0;
  for (Eigen::Index k = 0; k < r; ++k)
  {
    long long const n1 = levels_n[static_cast<std::size_t>(k)];
    auto const rows = U.middleRows(n0, n1 - n0).cwiseAbs2();
    out.row_sup[static_cast<std::size_t>(k)] = rows.maxCoeff();
    long long m0 = 0;
    for (Eigen::Index l = 0; l < c; ++l)
    {
      long long const m1 = levels_m[static_cast<std::size_t>(l)];
      out.block_sup(k, l) = rows.middleCols(m0, m1 - m0).maxCoeff();
      m0 = m1;
    }
    n0 = n1;
  }
  assemble(out);
  return out;
}

LocalCoherenceMatrix local_coherence(BasisConfig const& cfg, std::vector<IntPoint> const& fourier,
                                     std::vector<long long> const& levels_n,
                                     std::vector<SeparableWaveletIndex> const& wavelets,
                                     std::vector<long long> const& levels_m)
{
  cfg.validate();
  check_levels(levels_n, static_cast<long long>(fourier.size()), "sampling levels");
  check_levels(levels_m, static_cast<long long>(wavelets.size()), "sparsity levels");
  LocalCoherenceMatrix out;
  out.levels_n = levels_n;
  out.levels_m = levels_m;
  auto const r = static_cast<Eigen::Index>(levels_n.size());
  auto const c = static_cast<Eigen::Index>(levels_m.size());
  out.block_sup = Eigen::MatrixXd::Zero(r, c);
  out.row_sup.assign(static_cast<std::size_t>(r), 0.0);

  // Magnitudes depend on (s, j) only.
  std::vector<std::vector<std::pair<unsigned, int>>> classes(static_cast<std::size_t>(c));
  long long m0 = 0;
  for (Eigen::Index l = 0; l < c; ++l)
  {
    std::set<std::pair<unsigned, int>> seen;
    for (long long m = m0; m < levels_m[static_cast<std::size_t>(l)]; ++m)
      seen.emplace(wavelets[static_cast<std::size_t>(m)].s, wavelets[static_cast<std::size_t>(m)].j);
    classes[static_cast<std::size_t>(l)].assign(seen.begin(), seen.end());
    m0 = levels_m[static_cast<std::size_t>(l)];
  }

  long long n0 = 0;
  for (Eigen::Index k = 0; k < r; ++k)
  {
    long long const n1 = levels_n[static_cast<std::size_t>(k)];
    for (long long q = n0; q < n1; ++q)
    {
      IntPoint const& n = fourier[static_cast<std::size_t>(q)];
      out.row_sup[static_cast<std::size_t>(k)] =
          std::max(out.row_sup[static_cast<std::size_t>(k)], separable_coherence(cfg, n));
      for (Eigen::Index l = 0; l < c; ++l)
        for (auto const& [s, j] : classes[static_cast<std::size_t>(l)])
        {
          double v = std::pow(cfg.eps * std::ldexp(1.0, -j), cfg.d);
          double const scale = cfg.eps * std::ldexp(1.0, -j);
          for (int i = 0; i < cfg.d; ++i)
            v *= ft_power(cfg.fam, static_cast<int>((s >> i) & 1u), scale * static_cast<double>(n[i]), cfg.ft);
          out.block_sup(k, l) = std::max(out.block_sup(k, l), v);
        }
    }
    n0 = n1;
  }
  assemble(out);
  return out;
}

double DecayModel::operator()(double N) const
{
  if (kind == Kind::pow)
    return std::pow(N, -alpha);
  return std::pow(h_d(N, d), -alpha);
}

DecayFit fit_decay(CoherenceProfile const& profile, DecayModel const& model, long long lo, long long hi)
{
  long long const H = static_cast<long long>(profile.suffix.size());
  require(H >= 1000, ErrorCode::invalid_argument, "fit_decay: horizon must be at least 1000");
  if (lo <= 0)
    lo = std::max<long long>(1, static_cast<long long>(std::ceil(0.1 * static_cast<double>(H))));
  if (hi <= 0)
    hi = H;
  require(lo < hi && hi <= H, ErrorCode::invalid_argument, "fit_decay: invalid window");

  DecayFit fit;
  fit.c1 = std::numeric_limits<double>::infinity();
  fit.c2 = 0.0;
  for (long long N = lo; N <= hi; ++N)
  {
    double const v = profile.suffix[static_cast<std::size_t>(N - 1)];
    require(v > 0.0 && std::isfinite(v), ErrorCode::numerical, "fit_decay: degenerate profile (zero values)");
    double const ratio = v / model(static_cast<double>(N));
    fit.c1 = std::min(fit.c1, ratio);
    fit.c2 = std::max(fit.c2, ratio);
  }

  // Least squares on log-spaced ranks so that large N does not dominate.
  int const samples = 400;
  std::vector<long long> ranks;
  for (int i = 0; i < samples; ++i)
  {
    double const t = static_cast<double>(i) / (samples - 1);
    auto const N = static_cast<long long>(std::llround(std::exp(std::log(static_cast<double>(lo)) * (1 - t) +
                                                                std::log(static_cast<double>(hi)) * t)));
    if (ranks.empty() || N != ranks.back())
      ranks.push_back(N);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (long long N : ranks)
  {
    double const x = std::log(static_cast<double>(N));
    double const y = std::log(profile.suffix[static_cast<std::size_t>(N - 1)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double const m = static_cast<double>(ranks.size());
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

} // namespace cohere
