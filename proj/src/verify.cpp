#include "cohere/verify.hpp"

#include "cohere/coherence.hpp"
#include "cohere/error.hpp"
#include "cohere/measurement.hpp"
#include "cohere/ordering.hpp"
#include "cohere/sampling.hpp"
#include "cohere/solver.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace cohere
{
namespace
{
CheckResult check(std::string name, std::function<std::string()> const& body)
{
  CheckResult r;
  r.name = std::move(name);
  try
  {
    r.detail = body();
    r.passed = r.detail.empty();
  }
  catch (std::exception const& e)
  {
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

std::string ok_or(bool cond, std::string const& why)
{
  return cond ? std::string() : why;
}

} // namespace

std::vector<CheckResult> run_invariant_suite(int threads)
{
  std::vector<CheckResult> out;

  out.push_back(check("hyperbolic_count_divisor_sum", [] {
    for (long long N = 1; N <= 300; ++N)
    {
      long long sum = 0;
      for (long long i = 1; i <= N; ++i)
        sum += N / i;
      if (hyperbolic_count_n(2, N) != sum)
        return "S_2(" + std::to_string(N) + ") mismatch";
    }
    return ok_or(hyperbolic_count_z(2, 2) == 21, "R_2(2) != 21");
  }));

  out.push_back(check("sublevel_count_matches_enumeration", [] {
    auto const cons = ConsistencyFn::linear(2, ShapeDescriptor::ball());
    for (double K : {0.0, 1.0, 2.5, 7.0, 12.3})
    {
      long long visited = 0;
      for_each_sublevel(cons, K, [&](IntPoint const&) { ++visited; });
      if (visited != count_sublevel(cons, K))
        return "l_2 count mismatch at K=" + std::to_string(K);
    }
    return std::string();
  }));

  out.push_back(check("scale_termination_exact", [] {
    std::mt19937_64 rng(3);
    for (int p : {1, 2})
      for (int d : {1, 2})
      {
        BasisConfig cfg;
        cfg.d = d;
        cfg.fam = build_family(p);
        cfg.eps = std::min(0.5, BasisConfig::max_eps(0, p));
        for (int t = 0; t < 10; ++t)
        {
          IntPoint n = IntPoint::zeros(d);
          for (int i = 0; i < d; ++i)
            n[i] = static_cast<long>(uniform_below(rng, 2001)) - 1000;
          double const fast = frequency_coherence(cfg, n, WaveletKind::separable);
          double const brute = frequency_coherence_bruteforce(cfg, n, WaveletKind::separable, 25);
          if (std::abs(fast - brute) > 1e-12 * std::max(1.0, brute))
            return "mismatch at " + n.str();
        }
      }
    return std::string();
  }));

  out.push_back(check("measurement_adjoint", [] {
    ReconBasis const basis{2, 16, 0, Layout::separable};
    std::vector<IntPoint> freqs;
    for (long a = -8; a < 8; a += 3)
      for (long b = -8; b < 8; b += 2)
        freqs.push_back({a, b});
    FourierOperator const op(basis, freqs);
    double const mis = adjoint_mismatch(make_operator(op), 5);
    return ok_or(mis < 1e-8, "adjoint mismatch " + std::to_string(mis));
  }));

  out.push_back(check("fast_operator_matches_dense", [] {
    for (auto layout : {Layout::separable, Layout::tensor})
    {
      ReconBasis const basis{2, 8, 0, layout};
      std::vector<IntPoint> freqs;
      for (long a = -4; a < 4; ++a)
        for (long b = -4; b < 4; b += 3)
          freqs.push_back({a, b});
      FourierOperator const op(basis, freqs);
      Eigen::MatrixXcd const D = dense_matrix(basis, freqs);
      for (Eigen::Index c = 0; c < D.cols(); ++c)
      {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(D.cols());
        e[c] = 1.0;
        if ((op.apply(e) - D.col(c)).cwiseAbs().maxCoeff() > 1e-8)
          return "column " + std::to_string(c) + " differs";
      }
    }
    return std::string();
  }));

  out.push_back(check("haar_round_trip", [] {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (auto layout : {Layout::separable, Layout::tensor})
    {
      HaarGrid const grid{2, 32, 2, layout};
      std::vector<double> v(grid.size());
      for (auto& x : v)
        x = g(rng);
      auto w = v;
      haar_analyze(grid, w);
      haar_synthesize(grid, w);
      for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i] - w[i]) > 1e-10)
          return std::string("round trip error");
    }
    return std::string();
  }));

  out.push_back(check("level_uniformity", [] {
    std::vector<int> hits(4, 0);
    int const trials = 2000;
    for (int s = 0; s < trials; ++s)
      for (auto r : build_scheme({4, 8}, {1, 1}, static_cast<std::uint64_t>(s)).omega)
        if (r > 4)
          ++hits[static_cast<std::size_t>(r - 5)];
    for (int h : hits)
      if (std::abs(static_cast<double>(h) / trials - 0.25) > 0.03)
        return "frequency " + std::to_string(static_cast<double>(h) / trials);
    return std::string();
  }));

  out.push_back(check("mask_round_trip", [] {
    auto const ord = OrderingEnum::build(ConsistencyFn::hyperbolic_z(2), 400);
    auto const sc = build_scheme({50, 150, 400}, {50, 40, 30}, 17);
    Mask const mask = rasterize_mask(sc, ord, 400);
    return ok_or(mask_ranks(mask, ord) == sc.omega && mask.outside.empty(), "mask does not read back");
  }));

  out.push_back(check("profile_suffix_dominates_rows", [threads] {
    BasisConfig cfg;
    auto const prefix = lattice_prefix(ConsistencyFn::standard(), 512);
    auto const prof = row_profile(cfg, prefix, WaveletKind::separable, threads);
    for (std::size_t i = 0; i + 1 < prof.row.size(); ++i)
      if (prof.suffix[i] < prof.row[i] || prof.suffix[i] < prof.suffix[i + 1])
        return std::string("suffix envelope not monotone");
    return ok_or(std::abs(prof.row[0] - 0.5) < 1e-12, "row[1] != 1/2");
  }));

  out.push_back(check("solver_small_instances", [] {
    Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
    Eigen::VectorXcd y(2);
    y << 1.0, 0.0;
    SolverConfig cfg;
    cfg.tol_feas = 1e-9;
    cfg.tol_stagnation = 1e-12;
    auto const r = basis_pursuit(make_operator(I), y, cfg);
    return ok_or((r.x - y).cwiseAbs().maxCoeff() < 1e-6, "identity instance not recovered");
  }));

  return out;
}

} // namespace cohere
