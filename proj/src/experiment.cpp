#include "cohere/experiment.hpp"

#include "cohere/error.hpp"
#include "cohere/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace cohere
{
namespace
{
ImageSource parse_source(json const& doc, int d, std::string const& where)
{
  auto const type = json_field<std::string>(doc, "type", where);
  if (type == "lorentzian")
  {
    LorentzianSpectrum spec;
    spec.d = d;
    json const peaks = json_field<json>(doc, "peaks", where);
    if (!peaks.is_array() || peaks.empty())
      throw ConfigError(where + ".peaks", "need a nonempty array of peaks");
    for (std::size_t i = 0; i < peaks.size(); ++i)
    {
      std::string const w = where + ".peaks[" + std::to_string(i) + "]";
      LorentzianPeak pk;
      pk.p = json_field<std::vector<double>>(peaks[i], "p", w);
      pk.s = json_field<std::vector<double>>(peaks[i], "s", w);
      pk.amplitude = json_field_or<double>(peaks[i], "amplitude", w, 1.0);
      if (static_cast<int>(pk.p.size()) != d || static_cast<int>(pk.s.size()) != d)
        throw ConfigError(w, "position and width need d entries");
      for (double s : pk.s)
        if (!(s > 0.0))
          throw ConfigError(w + ".s", "widths must be positive");
      spec.peaks.push_back(std::move(pk));
    }
    return spec;
  }
  if (type == "block")
  {
    BlockPhantom ph;
    ph.d = d;
    for (auto const& b : json_field_or<json>(doc, "boxes", where, json::array()))
      ph.boxes.push_back({json_field<std::vector<double>>(b, "lo", where + ".boxes"),
                          json_field<std::vector<double>>(b, "hi", where + ".boxes"),
                          json_field_or<double>(b, "value", where + ".boxes", 1.0)});
    for (auto const& c : json_field_or<json>(doc, "checkerboards", where, json::array()))
      ph.checkers.push_back({json_field<std::vector<double>>(c, "origin", where + ".checkerboards"),
                             json_field<std::vector<double>>(c, "size", where + ".checkerboards"),
                             json_field<double>(c, "cell", where + ".checkerboards"),
                             json_field_or<double>(c, "contrast", where + ".checkerboards", 1.0)});
    try
    {
      ph.validate();
    }
    catch (Error const& e)
    {
      throw ConfigError(where, e.what());
    }
    return ph;
  }
  throw ConfigError(where + ".type", "unknown phantom type '" + type + "'");
}

SamplingSpec parse_sampling(json const& doc, std::string const& where)
{
  SamplingSpec s;
  s.ordering = json_field_or<std::string>(doc, "ordering", where, "l_inf");
  s.r = json_field_or<int>(doc, "r", where, 2);
  s.levels = json_field<std::vector<long long>>(doc, "levels", where);
  s.m = json_field_or<std::vector<long long>>(doc, "m", where, {});
  s.budget = json_field_or<long long>(doc, "budget", where, 0);
  s.decay = json_field_or<double>(doc, "decay", where, 0.5);
  if (s.levels.empty())
    throw ConfigError(where + ".levels", "need at least one level");
  if (s.m.empty() == (s.budget == 0))
    throw ConfigError(where + ".m", "give exactly one of m or a positive budget");
  if (s.budget < 0)
    throw ConfigError(where + ".budget", "budget must be positive");
  if (!s.m.empty() && s.m.size() != s.levels.size())
    throw ConfigError(where + ".m", "one count per level required");
  if (!s.m.empty())
  {
    long long total = 0;
    for (auto v : s.m)
      total += v;
    if (total <= 0)
      throw ConfigError(where + ".m", "sample budget must be positive");
  }
  if (!(s.decay >= 0.0))
    throw ConfigError(where + ".decay", "decay must be nonnegative");
  return s;
}

} // namespace

ConsistencyFn sampling_consistency(std::string const& name, int d, int r)
{
  if (name == "l_inf")
    return ConsistencyFn::linear(d, ShapeDescriptor::box());
  if (name == "l_2")
    return ConsistencyFn::linear(d, ShapeDescriptor::ball());
  if (name == "l_1")
    return ConsistencyFn::linear(d, ShapeDescriptor::diamond());
  if (name == "hyperbolic")
    return ConsistencyFn::hyperbolic_z(d);
  if (name == "semi_hyperbolic")
    return ConsistencyFn::semi_hyperbolic(d, r);
  fail(ErrorCode::invalid_argument, "unknown sampling ordering '" + name + "'");
}

std::vector<IntPoint> box_ordering(ConsistencyFn const& cons, int d, long n)
{
  require(d >= 1 && d <= max_dim && n >= 2 && n % 2 == 0, ErrorCode::invalid_argument,
          "box_ordering: need 1 <= d <= 5 and even n");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i)
    total *= static_cast<std::size_t>(n);
  std::vector<std::pair<double, IntPoint>> keyed;
  keyed.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx)
  {
    IntPoint k = IntPoint::zeros(d);
    std::size_t rem = idx;
    for (int i = 0; i < d; ++i)
    {
      k[i] = static_cast<long>(rem % static_cast<std::size_t>(n)) - n / 2;
      rem /= static_cast<std::size_t>(n);
    }
    keyed.emplace_back(eval_consistency(cons, k), k);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<IntPoint> out;
  out.reserve(total);
  for (auto& [f, k] : keyed)
    out.push_back(k);
  return out;
}

std::vector<long long> allocate_budget(std::vector<long long> const& levels, long long budget, double decay)
{
  require(!levels.empty(), ErrorCode::invalid_argument, "allocate_budget: no levels");
  require(budget >= 1 && budget <= levels.back(), ErrorCode::invalid_argument,
          "allocate_budget: budget must lie in [1, N_r]");
  auto counts = [&](double t) {
    std::vector<long long> m;
    long long prev = 0;
    for (auto N : levels)
    {
      require(N > prev, ErrorCode::invalid_argument, "allocate_budget: level boundaries must increase");
      double const size = static_cast<double>(N - prev);
      double const rho = std::min(1.0, t * std::pow(static_cast<double>(prev + 1), -decay));
      m.push_back(std::min(N - prev, static_cast<long long>(std::llround(size * rho))));
      prev = N;
    }
    return m;
  };
  auto sum = [](std::vector<long long> const& m) {
    long long s = 0;
    for (auto v : m)
      s += v;
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (sum(counts(hi)) < budget)
    hi *= 2.0;
  for (int it = 0; it < 200; ++it)
  {
    double const mid = 0.5 * (lo + hi);
    (sum(counts(mid)) < budget ? lo : hi) = mid;
  }
  auto m = counts(hi);
  // fix the rounding surplus on the last levels that have room
  long long excess = sum(m) - budget;
  for (std::size_t k = m.size(); k-- > 0 && excess > 0;)
  {
    long long const take = std::min(excess, m[k]);
    m[k] -= take;
    excess -= take;
  }
  return m;
}

Pattern build_pattern(SamplingSpec const& spec, int d, long n, std::uint64_t seed)
{
  ConsistencyFn const cons = sampling_consistency(spec.ordering, d, spec.r);
  std::vector<IntPoint> const order = box_ordering(cons, d, n);
  require(!spec.levels.empty() && spec.levels.back() <= static_cast<long long>(order.size()),
          ErrorCode::invalid_argument,
          "build_pattern: last level boundary exceeds the " + std::to_string(order.size()) + " box frequencies");
  std::vector<long long> m = spec.m.empty() ? allocate_budget(spec.levels, spec.budget, spec.decay) : spec.m;
  Pattern p;
  p.scheme = build_scheme(spec.levels, std::move(m), seed);
  p.freqs.reserve(p.scheme.omega.size());
  for (auto rank : p.scheme.omega)
    p.freqs.push_back(order[static_cast<std::size_t>(rank - 1)]);
  return p;
}

PgmImage pattern_image(std::vector<IntPoint> const& freqs, long n)
{
  PgmImage img;
  img.width = img.height = n;
  img.maxval = 255;
  img.pixels.assign(static_cast<std::size_t>(n * n), 0);
  for (auto const& k : freqs)
  {
    require(k.d == 2, ErrorCode::invalid_argument, "pattern_image: frequencies must be 2-D");
    long const col = k[0] + n / 2, row = n / 2 - 1 - k[1];
    require(col >= 0 && col < n && row >= 0 && row < n, ErrorCode::invalid_argument,
            "pattern_image: frequency " + k.str() + " outside the box");
    img.pixels[static_cast<std::size_t>(row * n + col)] = 255;
  }
  return img;
}

void ExperimentConfig::validate() const
{
  require(source_dim(source) == d, ErrorCode::invalid_argument, "experiment: phantom dimension differs from d");
  ReconBasis{d, n, J, Layout::separable}.validate();
  require(oversample >= 2, ErrorCode::invalid_argument, "experiment: oversample must be >= 2");
  require(!recons.empty(), ErrorCode::invalid_argument, "experiment: no reconstructions");
  require(tol_feas_relative > 0.0, ErrorCode::invalid_argument, "experiment: tol_feas_relative must be positive");
  solver.validate();
  require(patch_lo.size() == patch_hi.size() && (patch_lo.empty() || static_cast<int>(patch_lo.size()) == d),
          ErrorCode::invalid_argument, "experiment: patch needs d lower and d upper bounds");
}

SolverConfig parse_solver(json const& doc, std::string const& where)
{
  SolverConfig s;
  s.max_iterations = json_field_or<int>(doc, "max_iterations", where, s.max_iterations);
  s.tau = json_field_or<double>(doc, "tau", where, s.tau);
  s.sigma = json_field_or<double>(doc, "sigma", where, s.sigma);
  s.step_fraction = json_field_or<double>(doc, "step_fraction", where, s.step_fraction);
  s.step_ratio = json_field_or<double>(doc, "step_ratio", where, s.step_ratio);
  s.adaptive = json_field_or<bool>(doc, "adaptive", where, s.adaptive);
  s.tol_feas = json_field_or<double>(doc, "tol_feas", where, s.tol_feas);
  s.tol_stagnation = json_field_or<double>(doc, "tol_stagnation", where, s.tol_stagnation);
  s.window = json_field_or<int>(doc, "window", where, s.window);
  s.power_iterations = json_field_or<int>(doc, "power_iterations", where, s.power_iterations);
  try
  {
    s.validate();
  }
  catch (Error const& e)
  {
    throw ConfigError(where, e.what());
  }
  return s;
}

ExperimentConfig parse_experiment(json const& doc)
{
  if (!doc.is_object())
    throw ConfigError("<root>", "experiment config must be a JSON object");
  if (json_field<int>(doc, "schema_version", "") != 1)
    throw ConfigError("schema_version", "unsupported schema version");
  ExperimentConfig cfg;
  cfg.d = json_field_or<int>(doc, "d", "", 2);
  if (cfg.d < 1 || cfg.d > max_dim)
    throw ConfigError("d", "must lie in 1..5");
  cfg.n = json_field_or<long>(doc, "resolution", "", 256);
  cfg.J = json_field_or<int>(doc, "J", "", 0);
  try
  {
    ReconBasis{cfg.d, cfg.n, cfg.J, Layout::separable}.validate();
  }
  catch (Error const& e)
  {
    throw ConfigError("resolution", e.what());
  }
  cfg.oversample = json_field_or<int>(doc, "oversample", "", 4);
  if (cfg.oversample < 2)
    throw ConfigError("oversample", "must be >= 2");
  cfg.source = parse_source(json_field<json>(doc, "phantom", ""), cfg.d, "phantom");
  cfg.solver = parse_solver(json_field_or<json>(doc, "solver", "", json::object()), "solver");
  cfg.tol_feas_relative = json_field_or<double>(doc, "tol_feas_relative", "", cfg.tol_feas_relative);
  if (!(cfg.tol_feas_relative > 0.0))
    throw ConfigError("tol_feas_relative", "must be positive");
  cfg.seed = json_field_or<std::uint64_t>(doc, "seed", "", 0);
  if (doc.contains("patch"))
  {
    cfg.patch_lo = json_field<std::vector<double>>(doc["patch"], "lo", "patch");
    cfg.patch_hi = json_field<std::vector<double>>(doc["patch"], "hi", "patch");
    if (static_cast<int>(cfg.patch_lo.size()) != cfg.d || static_cast<int>(cfg.patch_hi.size()) != cfg.d)
      throw ConfigError("patch", "need d lower and d upper bounds");
  }
  json const recons = json_field<json>(doc, "reconstructions", "");
  if (!recons.is_array() || recons.empty())
    throw ConfigError("reconstructions", "need a nonempty array");
  for (std::size_t i = 0; i < recons.size(); ++i)
  {
    std::string const w = "reconstructions[" + std::to_string(i) + "]";
    ReconSpec r;
    r.name = json_field<std::string>(recons[i], "name", w);
    auto const basis = json_field_or<std::string>(recons[i], "basis", w, "separable");
    if (basis == "separable")
      r.layout = Layout::separable;
    else if (basis == "tensor")
      r.layout = Layout::tensor;
    else
      throw ConfigError(w + ".basis", "must be 'separable' or 'tensor'");
    r.sampling = parse_sampling(json_field<json>(recons[i], "sampling", w), w + ".sampling");
    try
    {
      sampling_consistency(r.sampling.ordering, cfg.d, r.sampling.r).validate();
    }
    catch (Error const& e)
    {
      throw ConfigError(w + ".sampling.ordering", e.what());
    }
    long long box = 1;
    for (int k = 0; k < cfg.d; ++k)
      box *= cfg.n;
    if (r.sampling.levels.back() > box)
      throw ConfigError(w + ".sampling.levels", "last boundary exceeds the frequency box size " + std::to_string(box));
    if (r.sampling.budget > r.sampling.levels.back())
      throw ConfigError(w + ".sampling.budget", "exceeds the last level boundary");
    for (auto const& other : cfg.recons)
      if (other.name == r.name)
        throw ConfigError(w + ".name", "duplicate reconstruction name");
    cfg.recons.push_back(std::move(r));
  }
  return cfg;
}

ReconResult const& ExperimentResult::find(std::string const& name) const
{
  for (auto const& r : recons)
    if (r.name == name)
      return r;
  fail(ErrorCode::invalid_argument, "no reconstruction named '" + name + "'");
}

ReconResult run_reconstruction(ExperimentConfig const& cfg, ReconSpec const& spec, Raster const& reference)
{
  ReconResult out;
  out.name = spec.name;
  out.pattern = build_pattern(spec.sampling, cfg.d, cfg.n, cfg.seed);
  ReconBasis const basis{cfg.d, cfg.n, cfg.J, spec.layout};
  Eigen::VectorXcd const y = simulate_measurements(cfg.source, out.pattern.freqs, 0.5, cfg.n, cfg.oversample);
  FourierOperator const op(basis, out.pattern.freqs);
  SolverConfig solver = cfg.solver;
  solver.tol_feas = cfg.tol_feas_relative * y.norm();
  out.solve = basis_pursuit(make_operator(op), y, solver);
  out.image = synthesize(basis, out.solve.x, cfg.n);
  out.l1 = l1_error(out.image, reference);
  if (!cfg.patch_lo.empty())
    out.patch_corr = patch_correlation(out.image, reference, cfg.patch_lo, cfg.patch_hi);
  return out;
}

ExperimentResult run_experiment(ExperimentConfig const& cfg)
{
  cfg.validate();
  ExperimentResult res;
  res.reference = cell_average(cfg.source, cfg.n);
  res.recons.resize(cfg.recons.size());
  parallel_for(cfg.recons.size(), cfg.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      res.recons[i] = run_reconstruction(cfg, cfg.recons[i], res.reference);
  });
  return res;
}

json result_json(ExperimentResult const& res)
{
  json out;
  out["reconstructions"] = json::array();
  for (auto const& r : res.recons)
  {
    json j;
    j["name"] = r.name;
    j["samples"] = r.pattern.freqs.size();
    j["level_counts"] = r.pattern.scheme.m;
    j["l1_error"] = r.l1;
    j["patch_correlation"] = r.patch_corr;
    j["iterations"] = r.solve.iterations;
    j["operator_norm"] = r.solve.op_norm;
    j["final_residual"] = r.solve.residuals.empty() ? 0.0 : r.solve.residuals.back();
    j["residuals"] = r.solve.residuals;
    out["reconstructions"].push_back(std::move(j));
  }
  return out;
}

} // namespace cohere
