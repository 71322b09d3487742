#include "cohere/cli.hpp"

#include "cohere/coherence.hpp"
#include "cohere/error.hpp"
#include "cohere/experiment.hpp"
#include "cohere/legendre.hpp"
#include "cohere/parallel.hpp"
#include "cohere/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <sstream>

namespace cohere
{
namespace
{
void require_schema(json const& doc)
{
  if (!doc.is_object())
    throw ConfigError("<root>", "config must be a JSON object");
  if (json_field<int>(doc, "schema_version", "") != 1)
    throw ConfigError("schema_version", "unsupported schema version");
}

// Wraps library validation failures so the message names the config field.
template <class F>
auto as_config(std::string const& field, F&& f)
{
  try
  {
    return f();
  }
  catch (ConfigError const&)
  {
    throw;
  }
  catch (Error const& e)
  {
    if (e.code() == ErrorCode::unsupported_family || e.code() == ErrorCode::invalid_argument ||
        e.code() == ErrorCode::type_mismatch)
      throw Error(e.code(), field + ": " + e.what());
    throw;
  }
}

struct BasisSpec
{
  bool legendre = false;
  WaveletKind kind = WaveletKind::separable;
  BasisConfig cfg;
};

BasisSpec parse_basis(json const& doc, std::string const& where)
{
  BasisSpec b;
  auto const family = json_field<std::string>(doc, "family", where);
  b.cfg.d = json_field_or<int>(doc, "d", where, 1);
  b.cfg.J = json_field_or<int>(doc, "J", where, 0);
  b.cfg.eps = json_field_or<double>(doc, "eps", where, 0.5);
  auto const kind = json_field_or<std::string>(doc, "kind", where, "separable");
  if (kind == "separable")
    b.kind = WaveletKind::separable;
  else if (kind == "tensor")
    b.kind = WaveletKind::tensor;
  else
    throw ConfigError(where + ".kind", "must be 'separable' or 'tensor'");
  if (family == "legendre")
  {
    b.legendre = true;
    if (b.cfg.d != 1)
      throw ConfigError(where + ".d", "the Legendre basis is one-dimensional");
    if (!(b.cfg.eps > 0.0 && b.cfg.eps <= 0.45))
      throw ConfigError(where + ".eps", "must lie in (0, 0.45] for the Legendre basis");
    return b;
  }
  int p = 1;
  if (family == "haar")
    p = 1;
  else if (family == "daubechies")
    p = json_field<int>(doc, "p", where);
  else
    throw Error(ErrorCode::unsupported_family, where + ".family: unknown family '" + family + "'");
  b.cfg.fam = as_config(where + ".p", [&] { return build_family(p); });
  as_config(where, [&] {
    b.cfg.validate();
    return 0;
  });
  return b;
}

ConsistencyFn parse_consistency(json const& doc, int d, std::string const& where)
{
  auto const name = json_field<std::string>(doc, "name", where);
  ConsistencyFn c;
  if (name == "standard")
    c = ConsistencyFn::standard();
  else if (name == "hyperbolic_n")
    c = ConsistencyFn::hyperbolic_n(d);
  else if (name == "hyperbolic_z")
    c = ConsistencyFn::hyperbolic_z(d);
  else if (name == "polytope")
    c = ConsistencyFn::linear(d, as_config(where + ".vertices", [&] {
          return ShapeDescriptor::from_vertices(
              json_field<std::vector<std::vector<double>>>(doc, "vertices", where));
        }));
  else
    c = as_config(where + ".name",
                  [&] { return sampling_consistency(name, d, json_field_or<int>(doc, "r", where, 2)); });
  as_config(where, [&] {
    c.validate();
    return 0;
  });
  return c;
}

std::string profile_csv(CoherenceProfile const& prof)
{
  std::string out = "rank,row,suffix\n";
  for (std::size_t i = 0; i < prof.row.size(); ++i)
    out += std::to_string(i + 1) + "," + fmt_double(prof.row[i]) + "," + fmt_double(prof.suffix[i]) + "\n";
  return out;
}

json profile_summary(CoherenceProfile const& prof)
{
  json j;
  j["ordering"] = prof.ordering;
  j["horizon"] = prof.horizon;
  j["tail_bound"] = prof.tail_bound;
  j["certified"] = prof.certified;
  j["boundary_attained"] = prof.boundary_attained;
  return j;
}

std::string tuple_columns(IntPoint const& n)
{
  std::string s;
  for (int i = 0; i < n.d; ++i)
    s += "," + std::to_string(n[i]);
  return s;
}

std::string axis_header(char const* prefix, int d)
{
  std::string s;
  for (int i = 0; i < d; ++i)
    s += std::string(",") + prefix + std::to_string(i);
  return s;
}

} // namespace

int exit_code(ErrorCode code)
{
  switch (code)
  {
  case ErrorCode::config:
  case ErrorCode::invalid_argument:
  case ErrorCode::unsupported_family:
  case ErrorCode::type_mismatch:
    return 2;
  case ErrorCode::numerical:
  case ErrorCode::non_convergence:
  case ErrorCode::capacity:
    return 3;
  case ErrorCode::io:
    return 1;
  }
  return 1;
}

RunOutputs cmd_coherence(json const& doc, CliOptions const& opt)
{
  require_schema(doc);
  BasisSpec const basis = parse_basis(json_field<json>(doc, "basis", ""), "basis");
  auto const horizon = json_field<long long>(doc, "horizon", "");
  if (horizon < 1)
    throw ConfigError("horizon", "must be >= 1");
  auto const rows = json_field_or<std::string>(doc, "rows", "", "fourier");
  if (rows != "fourier" && rows != "wavelet")
    throw ConfigError("rows", "must be 'fourier' or 'wavelet'");
  long const extent = json_field_or<long>(doc, "image_extent", "", 0);
  if (extent < 0)
    throw ConfigError("image_extent", "must be >= 0");
  if (extent > 0 && (basis.legendre || basis.cfg.d < 2 || basis.cfg.d > 3))
    throw ConfigError("image_extent", "images need a 2-D or 3-D wavelet basis");

  RunOutputs outputs(opt.out);
  CoherenceProfile prof;
  if (rows == "wavelet")
  {
    if (basis.legendre)
      throw ConfigError("rows", "wavelet rows need a wavelet basis");
    WaveletRowOptions wopt;
    wopt.strict = opt.strict;
    prof = basis.kind == WaveletKind::separable
               ? wavelet_row_profile(basis.cfg, separable_prefix(basis.cfg, horizon), wopt)
               : wavelet_row_profile(basis.cfg, tensor_prefix(basis.cfg, horizon), wopt);
  }
  else
  {
    ConsistencyFn const cons = parse_consistency(json_field<json>(doc, "ordering", ""), basis.cfg.d, "ordering");
    if (!cons.on_lattice())
      throw ConfigError("ordering.name", "Fourier rows need a lattice ordering");
    auto const prefix = lattice_prefix(cons, horizon);
    prof = basis.legendre ? legendre_row_profile(basis.cfg.eps, prefix, opt.threads)
                          : row_profile(basis.cfg, prefix, basis.kind, opt.threads);
    if (prof.ordering.empty())
      prof.ordering = cons.name();
  }
  outputs.add("profile.csv", profile_csv(prof));
  outputs.add("profile.json", profile_summary(prof).dump(2) + "\n");

  if (extent > 0)
  {
    int const d = basis.cfg.d;
    long const side = 2 * extent + 1;
    std::size_t cells = 1;
    for (int i = 0; i < d; ++i)
      cells *= static_cast<std::size_t>(side);
    require(cells <= 50'000'000, ErrorCode::capacity, "coherence image: too many cells");
    std::vector<double> mu(cells);
    parallel_for(cells, opt.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t idx = b; idx < e; ++idx)
      {
        IntPoint n = IntPoint::zeros(d);
        std::size_t rem = idx;
        for (int i = 0; i < d; ++i)
        {
          n[i] = static_cast<long>(rem % static_cast<std::size_t>(side)) - extent;
          rem /= static_cast<std::size_t>(side);
        }
        mu[idx] = frequency_coherence(basis.cfg, n, basis.kind);
      }
    });
    if (d == 2)
    {
      double top = 0.0;
      for (double v : mu)
        top = std::max(top, std::sqrt(v));
      PgmImage img;
      img.width = img.height = side;
      img.maxval = 65535;
      img.pixels.resize(cells);
      for (long row = 0; row < side; ++row)
        for (long col = 0; col < side; ++col)
        {
          double const v = std::sqrt(mu[static_cast<std::size_t>((side - 1 - row) * side + col)]);
          img.pixels[static_cast<std::size_t>(row * side + col)] =
              static_cast<std::uint16_t>(std::lround(top > 0.0 ? 65535.0 * v / top : 0.0));
        }
      outputs.add("coherence.pgm", encode_pgm(img));
    }
    else
    {
      outputs.add("coherence.f32", encode_f32(mu));
      json side_car;
      side_car["dims"] = {side, side, side};
      side_car["extent"] = extent;
      side_car["dtype"] = "float32-le";
      side_car["layout"] = "axis 0 fastest";
      outputs.add("coherence.json", side_car.dump(2) + "\n");
    }
  }
  return outputs;
}

RunOutputs cmd_counts(json const& doc, CliOptions const& opt)
{
  require_schema(doc);
  int const d = json_field_or<int>(doc, "d", "", 2);
  if (d < 1 || d > max_dim)
    throw ConfigError("d", "must lie in 1..5");
  auto const variant = json_field<std::string>(doc, "variant", "");
  auto const values = json_field<std::vector<double>>(doc, "values", "");
  if (values.empty())
    throw ConfigError("values", "need at least one K");
  json ord;
  ord["name"] = variant;
  ord["r"] = json_field_or<int>(doc, "r", "", 2);
  ConsistencyFn const cons = parse_consistency(ord, d, "variant");
  if (!cons.on_lattice())
    throw ConfigError("variant", "counts need a lattice ordering");
  for (double K : values)
    if (!(K >= 0.0))
      throw ConfigError("values", "K must be nonnegative");

  std::string csv = "K,count,envelope,count_over_envelope,h_d_of_count\n";
  for (double K : values)
  {
    long long const c = cons.kind == ConsistencyFn::Kind::hyperbolic_n ? hyperbolic_count_n(d, static_cast<long long>(K))
                        : cons.kind == ConsistencyFn::Kind::hyperbolic_z ? hyperbolic_count_z(d, static_cast<long long>(K))
                                                                         : count_sublevel(cons, K);
    double const env = std::max(K, 1.0) * std::pow(std::log(std::max(K, 1.0) + 1.0), d - 1);
    csv += fmt_double(K) + "," + std::to_string(c) + "," + fmt_double(env) + "," +
           fmt_double(static_cast<double>(c) / env) + "," +
           (c >= 1 ? fmt_double(h_d(static_cast<double>(c), d)) : std::string("0")) + "\n";
  }
  RunOutputs outputs(opt.out);
  outputs.add("counts.csv", csv);
  return outputs;
}

RunOutputs cmd_ordering(json const& doc, CliOptions const& opt)
{
  require_schema(doc);
  auto const count = json_field<long long>(doc, "count", "");
  if (count < 1)
    throw ConfigError("count", "must be >= 1");
  json const ord = json_field<json>(doc, "ordering", "");
  auto const name = json_field<std::string>(ord, "name", "ordering");
  RunOutputs outputs(opt.out);
  if (name == "level" || name == "tensor_hyperbolic")
  {
    BasisSpec const basis = parse_basis(json_field<json>(doc, "basis", ""), "basis");
    if (basis.legendre)
      throw ConfigError("basis.family", "wavelet orderings need a wavelet family");
    int const d = basis.cfg.d;
    if (name == "level")
    {
      auto const cons = ConsistencyFn::leveled(basis.cfg);
      std::string csv = "rank,s,j" + axis_header("k", d) + ",F\n";
      auto const prefix = separable_prefix(basis.cfg, count);
      for (std::size_t i = 0; i < prefix.size(); ++i)
        csv += std::to_string(i + 1) + "," + std::to_string(prefix[i].s) + "," + std::to_string(prefix[i].j) +
               tuple_columns(prefix[i].k) + "," + fmt_double(eval_consistency(cons, AnyIndex{prefix[i]})) + "\n";
      outputs.add("prefix.csv", csv);
    }
    else
    {
      auto const cons = ConsistencyFn::tensor_hyperbolic(basis.cfg);
      std::string csv = "rank,s" + axis_header("j", d) + axis_header("k", d) + ",F\n";
      auto const prefix = tensor_prefix(basis.cfg, count);
      for (std::size_t i = 0; i < prefix.size(); ++i)
      {
        csv += std::to_string(i + 1) + "," + std::to_string(prefix[i].s);
        for (int a = 0; a < d; ++a)
          csv += "," + std::to_string(prefix[i].j[static_cast<std::size_t>(a)]);
        csv += tuple_columns(prefix[i].k) + "," + fmt_double(eval_consistency(cons, AnyIndex{prefix[i]})) + "\n";
      }
      outputs.add("prefix.csv", csv);
    }
    return outputs;
  }
  int const d = json_field_or<int>(doc, "d", "", 1);
  if (d < 1 || d > max_dim)
    throw ConfigError("d", "must lie in 1..5");
  ConsistencyFn const cons = parse_consistency(ord, d, "ordering");
  auto const prefix = lattice_prefix(cons, count);
  std::string csv = "rank" + axis_header("n", d) + ",F\n";
  for (std::size_t i = 0; i < prefix.size(); ++i)
    csv += std::to_string(i + 1) + tuple_columns(prefix[i]) + "," + fmt_double(eval_consistency(cons, prefix[i])) + "\n";
  outputs.add("prefix.csv", csv);
  return outputs;
}

RunOutputs cmd_pattern(json const& doc, CliOptions const& opt)
{
  require_schema(doc);
  int const d = json_field_or<int>(doc, "d", "", 2);
  if (d < 1 || d > max_dim)
    throw ConfigError("d", "must lie in 1..5");
  ConsistencyFn const cons = parse_consistency(json_field<json>(doc, "ordering", ""), d, "ordering");
  if (!cons.on_lattice())
    throw ConfigError("ordering.name", "patterns need a lattice ordering");
  auto const levels = json_field<std::vector<long long>>(doc, "levels", "");
  if (levels.empty())
    throw ConfigError("levels", "need at least one level");
  for (std::size_t k = 0; k < levels.size(); ++k)
    if (levels[k] <= (k == 0 ? 0 : levels[k - 1]))
      throw ConfigError("levels", "boundaries must be positive and strictly increasing");
  std::vector<long long> m = json_field_or<std::vector<long long>>(doc, "m", "", {});
  long long const budget = json_field_or<long long>(doc, "budget", "", 0);
  if (m.empty() == (budget <= 0))
    throw ConfigError("m", "give exactly one of m or a positive budget");
  if (m.empty())
  {
    if (budget > levels.back())
      throw ConfigError("budget", "exceeds the last level boundary");
    m = allocate_budget(levels, budget, json_field_or<double>(doc, "decay", "", 0.5));
  }
  if (m.size() != levels.size())
    throw ConfigError("m", "one count per level required");
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k] < 0 || m[k] > levels[k] - (k == 0 ? 0 : levels[k - 1]))
      throw ConfigError("m", "m_" + std::to_string(k + 1) + " must lie in [0, level size]");
  long const extent = json_field<long>(doc, "extent", "");
  if (extent < 0)
    throw ConfigError("extent", "must be >= 0");
  std::uint64_t const seed = opt.seed.value_or(json_field_or<std::uint64_t>(doc, "seed", "", 0));

  auto const ordering = OrderingEnum::build(cons, levels.back());
  SamplingScheme const scheme = build_scheme(levels, m, seed);
  Mask const mask = rasterize_mask(scheme, ordering, extent, opt.strict);

  RunOutputs outputs(opt.out);
  std::string csv = "rank" + axis_header("n", d) + "\n";
  for (auto r : scheme.omega)
    csv += std::to_string(r) + tuple_columns(ordering.at(r)) + "\n";
  outputs.add("samples.csv", csv);
  if (d == 2)
  {
    long const side = mask.side();
    PgmImage img;
    img.width = img.height = side;
    img.maxval = 255;
    img.pixels.resize(static_cast<std::size_t>(side * side));
    for (long row = 0; row < side; ++row)
      for (long col = 0; col < side; ++col)
        img.pixels[static_cast<std::size_t>(row * side + col)] =
            mask.cells[static_cast<std::size_t>((side - 1 - row) * side + col)] ? 255 : 0;
    outputs.add("mask.pgm", encode_pgm(img));
  }
  json info;
  info["ordering"] = cons.name();
  info["levels"] = levels;
  info["m"] = m;
  info["seed"] = seed;
  info["samples"] = scheme.omega.size();
  info["outside_extent"] = mask.outside;
  outputs.add("pattern.json", info.dump(2) + "\n");
  return outputs;
}

RunOutputs cmd_reconstruct(json const& doc, CliOptions const& opt)
{
  ExperimentConfig cfg = parse_experiment(doc);
  if (opt.seed)
    cfg.seed = *opt.seed;
  cfg.threads = opt.threads;
  ExperimentResult const res = run_experiment(cfg);

  double lo = res.reference.v.front(), hi = lo;
  for (double v : res.reference.v)
  {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  RunOutputs outputs(opt.out);
  auto add_raster = [&](std::string const& name, Raster const& r) {
    if (r.d == 2)
      outputs.add(name + ".pgm", encode_pgm(raster_to_pgm(r, 65535, lo, hi)));
    outputs.add(name + ".f32", encode_f32(r.v));
    json side_car;
    side_car["dims"] = std::vector<long>(static_cast<std::size_t>(r.d), r.n);
    side_car["extent"] = {-1.0, 1.0};
    side_car["dtype"] = "float32-le";
    side_car["layout"] = "axis 0 fastest";
    outputs.add(name + ".json", side_car.dump(2) + "\n");
  };
  add_raster("reference", res.reference);
  for (auto const& r : res.recons)
  {
    add_raster(r.name, r.image);
    if (cfg.d == 2)
      outputs.add(r.name + "_mask.pgm", encode_pgm(pattern_image(r.pattern.freqs, cfg.n)));
  }
  outputs.add("results.json", result_json(res).dump(2) + "\n");
  return outputs;
}

RunOutputs cmd_verify(CliOptions const& opt, bool& all_passed)
{
  auto const checks = run_invariant_suite(opt.threads);
  json j = json::array();
  all_passed = true;
  for (auto const& c : checks)
  {
    j.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    all_passed = all_passed && c.passed;
  }
  RunOutputs outputs(opt.out);
  outputs.add("verify.json", j.dump(2) + "\n");
  return outputs;
}

int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Coherence analysis, sampling patterns and l1 reconstruction"};
  app.require_subcommand(1);
  CliOptions opt;
  std::uint64_t seed = 0;
  for (char const* name : {"coherence", "counts", "ordering", "pattern", "reconstruct", "verify"})
  {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "JSON config path");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", opt.threads, "worker cap")->check(CLI::Range(1, 1024));
    sub->add_option("--out", opt.out, "output directory");
    sub->add_flag("--strict", opt.strict, "turn scan-boundary and extent warnings into errors");
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try
  {
    app.parse(rev);
  }
  catch (CLI::CallForHelp const&)
  {
    out << app.help();
    return 0;
  }
  catch (CLI::ParseError const& e)
  {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  auto const command = app.get_subcommands().front()->get_name();
  if (app.get_subcommands().front()->count("--seed") > 0)
    opt.seed = seed;

  try
  {
    json doc = json::object();
    if (command != "verify")
    {
      if (opt.config.empty())
        throw ConfigError("--config", "required for '" + command + "'");
      std::string text;
      try
      {
        text = read_file(opt.config);
      }
      catch (Error const&)
      {
        throw ConfigError("--config", "cannot read " + opt.config);
      }
      try
      {
        doc = json::parse(text);
      }
      catch (json::parse_error const& e)
      {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
      }
    }
    bool passed = true;
    RunOutputs outputs = command == "coherence"     ? cmd_coherence(doc, opt)
                         : command == "counts"      ? cmd_counts(doc, opt)
                         : command == "ordering"    ? cmd_ordering(doc, opt)
                         : command == "pattern"     ? cmd_pattern(doc, opt)
                         : command == "reconstruct" ? cmd_reconstruct(doc, opt)
                                                    : cmd_verify(opt, passed);
    std::uint64_t const used_seed = opt.seed.value_or(json_field_or<std::uint64_t>(doc, "seed", "", 0));
    json resolved = doc;
    if (opt.seed && resolved.is_object() && command != "verify")
      resolved["seed"] = *opt.seed;
    outputs.commit(command, resolved, used_seed);
    if (!passed)
    {
      err << "verify: some invariant checks failed (see verify.json)\n";
      return 3;
    }
    return 0;
  }
  catch (NonConvergenceError const& e)
  {
    err << "error: " << e.what() << "\n";
    std::string log = "iteration,residual\n";
    auto const& h = e.residual_history();
    for (std::size_t i = 0; i < h.size(); ++i)
      log += std::to_string(i + 1) + "," + fmt_double(h[i]) + "\n";
    try
    {
      write_atomic(std::filesystem::path(opt.out) / "residuals.csv", log);
      err << "residual history written to " << (std::filesystem::path(opt.out) / "residuals.csv").string() << "\n";
    }
    catch (Error const&)
    {
    }
    return 3;
  }
  catch (Error const& e)
  {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code(e.code());
  }
  catch (std::exception const& e)
  {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace cohere
