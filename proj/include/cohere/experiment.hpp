#pragma once

#include "cohere/io.hpp"
#include "cohere/measurement.hpp"
#include "cohere/ordering.hpp"
#include "cohere/phantom.hpp"
#include "cohere/sampling.hpp"
#include "cohere/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cohere
{
/// Multilevel pattern over the frequency box [-n/2, n/2)^d.
/// Either `m` is given per level, or `budget` is split with density
/// min(1, t * (N_{k-1} + 1)^{-decay}) and t tuned to the budget.
struct SamplingSpec
{
  std::string ordering = "l_inf"; // l_inf, l_2, l_1, hyperbolic, semi_hyperbolic
  int r = 2;                      // semi_hyperbolic only
  std::vector<long long> levels;  // rank boundaries N_1 < ... < N_r
  std::vector<long long> m;
  long long budget = 0;
  double decay = 0.5;
};

ConsistencyFn sampling_consistency(std::string const& name, int d, int r);

/// Every frequency of the box sorted by (cons, lexicographic).
std::vector<IntPoint> box_ordering(ConsistencyFn const& cons, int d, long n);

/// Per-level counts for a total budget; sum(m) stays within one sample per level of the budget.
std::vector<long long> allocate_budget(std::vector<long long> const& levels, long long budget, double decay);

struct Pattern
{
  SamplingScheme scheme;
  std::vector<IntPoint> freqs;
};

Pattern build_pattern(SamplingSpec const& spec, int d, long n, std::uint64_t seed);

/// n x n mask image: white where sampled, frequency (0, 0) at column n/2, row n/2 - 1.
PgmImage pattern_image(std::vector<IntPoint> const& freqs, long n);

struct ReconSpec
{
  std::string name;
  Layout layout = Layout::separable;
  SamplingSpec sampling;
};

struct ExperimentConfig
{
  int d = 2;
  long n = 256;
  int J = 0;
  int oversample = 4;
  ImageSource source = LorentzianSpectrum{};
  std::vector<ReconSpec> recons;
  SolverConfig solver;
  double tol_feas_relative = 1e-4; // tol_feas = this * ||y||_2
  std::uint64_t seed = 0;
  int threads = 1;
  /// Optional patch [lo, hi] for correlation scoring.
  std::vector<double> patch_lo, patch_hi;

  void validate() const;
};

/// Parses an experiment document; ConfigError names the offending field.
ExperimentConfig parse_experiment(json const& doc);
SolverConfig parse_solver(json const& doc, std::string const& where);

struct ReconResult
{
  std::string name;
  Pattern pattern;
  Raster image;
  SolveResult solve;
  double l1 = 0.0;
  double patch_corr = 0.0;
};

struct ExperimentResult
{
  Raster reference;
  std::vector<ReconResult> recons;

  ReconResult const& find(std::string const& name) const;
};

ReconResult run_reconstruction(ExperimentConfig const& cfg, ReconSpec const& spec, Raster const& reference);

/// Runs every reconstruction; up to cfg.threads run concurrently.
ExperimentResult run_experiment(ExperimentConfig const& cfg);

json result_json(ExperimentResult const& res);

} // namespace cohere
