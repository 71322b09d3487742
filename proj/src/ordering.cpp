#include "cohere/ordering.hpp"

#include "cohere/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace cohere
{
namespace
{
using Kind = ConsistencyFn::Kind;

// Facets a.x <= 1 of a polytope whose interior contains 0.
struct Facets
{
  std::vector<Eigen::VectorXd> normals;
};

Facets polytope_facets(std::vector<std::vector<double>> const& verts)
{
  int const d = static_cast<int>(verts.front().size());
  int const nv = static_cast<int>(verts.size());
  Facets out;
  if (d == 1)
  {
    for (auto const& v : verts)
      if (v[0] != 0.0)
      {
        Eigen::VectorXd a(1);
        a[0] = 1.0 / v[0];
        out.normals.push_back(a);
      }
  }
  else
  {
    std::vector<int> pick(static_cast<std::size_t>(d));
    std::iota(pick.begin(), pick.end(), 0);
    while (true)
    {
      Eigen::MatrixXd V(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          V(r, c) = verts[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])][static_cast<std::size_t>(c)];
      Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
      if (lu.rank() == d)
      {
        Eigen::VectorXd a = lu.solve(Eigen::VectorXd::Ones(d));
        bool supporting = true;
        for (auto const& v : verts)
        {
          double dot = 0.0;
          for (int c = 0; c < d; ++c)
            dot += a[c] * v[static_cast<std::size_t>(c)];
          if (dot > 1.0 + 1e-9)
          {
            supporting = false;
            break;
          }
        }
        if (supporting)
          out.normals.push_back(a);
      }
      // next combination
      int i = d - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == nv - d + i)
        --i;
      if (i < 0)
        break;
      ++pick[static_cast<std::size_t>(i)];
      for (int m = i + 1; m < d; ++m)
        pick[static_cast<std::size_t>(m)] = pick[static_cast<std::size_t>(m - 1)] + 1;
    }
  }
  return out;
}

double gauge_from_facets(Facets const& f, std::span<double const> x)
{
  double g = 0.0;
  for (auto const& a : f.normals)
  {
    double dot = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c)
      dot += a[static_cast<Eigen::Index>(c)] * x[c];
    g = std::max(g, dot);
  }
  return g;
}

std::map<std::vector<std::vector<double>>, Facets>& facet_cache()
{
  static std::map<std::vector<std::vector<double>>, Facets> cache;
  return cache;
}

Facets const& facets_for(ShapeDescriptor const& shape)
{
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto& cache = facet_cache();
  auto it = cache.find(shape.vertices);
  if (it == cache.end())
    it = cache.emplace(shape.vertices, polytope_facets(shape.vertices)).first;
  return it->second;
}

double shape_gauge(ShapeDescriptor const& shape, IntPoint const& n)
{
  switch (shape.kind)
  {
  case ShapeDescriptor::Kind::l_inf:
    return static_cast<double>(n.max_abs());
  case ShapeDescriptor::Kind::l_1:
  {
    long s = 0;
    for (int i = 0; i < n.d; ++i)
      s += std::abs(n[i]);
    return static_cast<double>(s);
  }
  case ShapeDescriptor::Kind::l_2:
  {
    long s = 0;
    for (int i = 0; i < n.d; ++i)
      s += n[i] * n[i];
    return std::sqrt(static_cast<double>(s));
  }
  case ShapeDescriptor::Kind::polytope:
  {
    std::array<double, max_dim> x{};
    for (int i = 0; i < n.d; ++i)
      x[static_cast<std::size_t>(i)] = static_cast<double>(n[i]);
    return gauge_from_facets(facets_for(shape), std::span<double const>(x.data(), static_cast<std::size_t>(n.d)));
  }
  }
  return 0.0;
}

double top_r_product(std::array<long, max_dim> v, int d, int r)
{
  std::sort(v.begin(), v.begin() + d, std::greater<>());
  double p = 1.0;
  for (int i = 0; i < r; ++i)
    p *= static_cast<double>(v[static_cast<std::size_t>(i)]);
  return p;
}

// Lattice points by magnitude vectors v_i >= 1 (v = 1 stands for n in {-1, 0, 1}).
void enumerate_magnitudes(int d, int r, long K, std::function<void(IntPoint const&)> const& visit)
{
  std::array<long, max_dim> mag{};
  IntPoint pt = IntPoint::zeros(d);

  std::function<void(int)> signs = [&](int axis) {
    if (axis == d)
    {
      visit(pt);
      return;
    }
    long const m = mag[static_cast<std::size_t>(axis)];
    if (m == 1)
    {
      for (long v : {-1L, 0L, 1L})
      {
        pt[axis] = v;
        signs(axis + 1);
      }
    }
    else
    {
      pt[axis] = -m;
      signs(axis + 1);
      pt[axis] = m;
      signs(axis + 1);
    }
  };

  std::function<void(int)> rec = [&](int axis) {
    if (axis == d)
    {
      signs(0);
      return;
    }
    for (long v = 1;; ++v)
    {
      mag[static_cast<std::size_t>(axis)] = v;
      if (top_r_product(mag, axis + 1, std::min(r, axis + 1)) > static_cast<double>(K))
        break;
      rec(axis + 1);
    }
    mag[static_cast<std::size_t>(axis)] = 0;
  };
  if (K >= 1)
    rec(0);
}

void enumerate_hyperbolic_n(int d, long K, std::function<void(IntPoint const&)> const& visit)
{
  IntPoint pt = IntPoint::zeros(d);
  std::function<void(int, long)> rec = [&](int axis, long remaining) {
    if (axis == d)
    {
      visit(pt);
      return;
    }
    for (long v = 1; v <= remaining; ++v)
    {
      pt[axis] = v;
      rec(axis + 1, remaining / v);
    }
  };
  if (K >= 1)
    rec(0, K);
}

void enumerate_box(int d, long R, std::function<void(IntPoint const&)> const& visit)
{
  if (R < 0)
    return;
  IntPoint pt = IntPoint::zeros(d);
  for (int i = 0; i < d; ++i)
    pt[i] = -R;
  while (true)
  {
    visit(pt);
    int ax = d - 1;
    while (ax >= 0 && pt[ax] == R)
    {
      pt[ax] = -R;
      --ax;
    }
    if (ax < 0)
      break;
    ++pt[ax];
  }
}

void enumerate_l1(int d, long K, std::function<void(IntPoint const&)> const& visit)
{
  IntPoint pt = IntPoint::zeros(d);
  std::function<void(int, long)> rec = [&](int axis, long remaining) {
    if (axis == d)
    {
      visit(pt);
      return;
    }
    for (long v = -remaining; v <= remaining; ++v)
    {
      pt[axis] = v;
      rec(axis + 1, remaining - std::abs(v));
    }
  };
  if (K >= 0)
    rec(0, K);
}

void enumerate_l2(int d, long K2, std::function<void(IntPoint const&)> const& visit)
{
  IntPoint pt = IntPoint::zeros(d);
  std::function<void(int, long)> rec = [&](int axis, long remaining) {
    if (axis == d)
    {
      visit(pt);
      return;
    }
    long const lim = static_cast<long>(std::floor(std::sqrt(static_cast<double>(remaining)) + 1e-9));
    for (long v = -lim; v <= lim; ++v)
    {
      if (v * v > remaining)
        continue;
      pt[axis] = v;
      rec(axis + 1, remaining - v * v);
    }
  };
  if (K2 >= 0)
    rec(0, K2);
}

bool integer_valued(ConsistencyFn const& cons)
{
  return !(cons.kind == Kind::linear &&
           (cons.shape.kind == ShapeDescriptor::Kind::l_2 || cons.shape.kind == ShapeDescriptor::Kind::polytope));
}

long floor_threshold(double K)
{
  require(std::isfinite(K), ErrorCode::invalid_argument, "sublevel threshold must be finite");
  require(K < 4e18, ErrorCode::capacity, "sublevel threshold too large");
  return static_cast<long>(std::floor(K + 1e-9));
}

BasisConfig wavelet_cfg(ConsistencyFn const& cons)
{
  BasisConfig cfg;
  cfg.d = cons.d;
  cfg.fam = build_family(cons.p);
  cfg.J = cons.J;
  cfg.eps = BasisConfig::max_eps(cons.J, cons.p);
  return cfg;
}

// (s, j) combinations of tensor elements with sum_i j_i == total, sorted by (s, j).
std::vector<std::pair<unsigned, std::array<int, max_dim>>> tensor_types(int d, int J, int total)
{
  std::vector<std::pair<unsigned, std::array<int, max_dim>>> out;
  for (unsigned s = 0; s < (1u << d); ++s)
  {
    int const free_axes = std::popcount(s);
    int const rest = total - d * J;
    if (rest < 0 || (free_axes == 0 && rest != 0))
      continue;
    std::array<int, max_dim> j{};
    for (int i = 0; i < d; ++i)
      j[static_cast<std::size_t>(i)] = J;
    std::vector<int> axes;
    for (int i = 0; i < d; ++i)
      if ((s >> i) & 1u)
        axes.push_back(i);
    if (axes.empty())
    {
      out.push_back({s, j});
      continue;
    }
    // compositions of `rest` into |axes| nonnegative parts, lexicographic
    std::function<void(std::size_t, int)> rec = [&](std::size_t a, int left) {
      if (a + 1 == axes.size())
      {
        j[static_cast<std::size_t>(axes[a])] = J + left;
        out.push_back({s, j});
        return;
      }
      for (int v = 0; v <= left; ++v)
      {
        j[static_cast<std::size_t>(axes[a])] = J + v;
        rec(a + 1, left - v);
      }
    };
    rec(0, rest);
  }
  return out;
}

long long tensor_type_size(int d, int p, std::array<int, max_dim> const& j)
{
  long long n = 1;
  for (int i = 0; i < d; ++i)
    n *= translation_range(p, j[static_cast<std::size_t>(i)]).count();
  return n;
}

} // namespace

ShapeDescriptor ShapeDescriptor::from_vertices(std::vector<std::vector<double>> v)
{
  require(!v.empty(), ErrorCode::invalid_argument, "ShapeDescriptor: empty vertex list");
  std::size_t const d = v.front().size();
  require(d >= 1 && d <= static_cast<std::size_t>(max_dim), ErrorCode::invalid_argument,
          "ShapeDescriptor: vertex dimension must be in 1..5");
  require(v.size() > d, ErrorCode::invalid_argument, "ShapeDescriptor: need at least d+1 vertices");
  for (auto const& x : v)
  {
    require(x.size() == d, ErrorCode::invalid_argument, "ShapeDescriptor: inconsistent vertex dimension");
    for (double c : x)
      require(std::isfinite(c), ErrorCode::invalid_argument, "ShapeDescriptor: non-finite vertex");
  }
  ShapeDescriptor s{Kind::polytope, std::move(v)};
  Facets const f = polytope_facets(s.vertices);
  require(!f.normals.empty(), ErrorCode::invalid_argument, "ShapeDescriptor: degenerate polytope");

  // The origin is interior iff the gauge is positive in every direction.
  std::vector<std::vector<double>> probes;
  for (std::size_t i = 0; i < d; ++i)
    for (double sg : {-1.0, 1.0})
    {
      std::vector<double> e(d, 0.0);
      e[i] = sg;
      probes.push_back(e);
    }
  for (auto const& x : s.vertices)
  {
    std::vector<double> e(d);
    for (std::size_t i = 0; i < d; ++i)
      e[i] = -x[i];
    probes.push_back(e);
  }
  for (auto const& a : f.normals)
  {
    std::vector<double> e(d);
    for (std::size_t i = 0; i < d; ++i)
      e[i] = -a[static_cast<Eigen::Index>(i)];
    probes.push_back(e);
  }
  for (auto const& e : probes)
    require(gauge_from_facets(f, e) > 1e-12, ErrorCode::invalid_argument,
            "ShapeDescriptor: origin must lie strictly inside the polytope");
  return s;
}

double polytope_gauge(ShapeDescriptor const& shape, std::span<double const> x)
{
  require(shape.kind == ShapeDescriptor::Kind::polytope, ErrorCode::invalid_argument,
          "polytope_gauge: shape is not a polytope");
  return gauge_from_facets(facets_for(shape), x);
}

ConsistencyFn ConsistencyFn::standard()
{
  return {};
}

ConsistencyFn ConsistencyFn::leveled(BasisConfig const& cfg)
{
  ConsistencyFn c;
  c.kind = Kind::wavelet_level;
  c.d = cfg.d;
  c.J = cfg.J;
  c.p = cfg.fam.p;
  return c;
}

ConsistencyFn ConsistencyFn::tensor_hyperbolic(BasisConfig const& cfg)
{
  ConsistencyFn c = leveled(cfg);
  c.kind = Kind::tensor_hyp;
  return c;
}

ConsistencyFn ConsistencyFn::hyperbolic_n(int d)
{
  ConsistencyFn c;
  c.kind = Kind::hyperbolic_n;
  c.d = d;
  c.r = d;
  return c;
}

ConsistencyFn ConsistencyFn::hyperbolic_z(int d)
{
  ConsistencyFn c;
  c.kind = Kind::hyperbolic_z;
  c.d = d;
  c.r = d;
  return c;
}

ConsistencyFn ConsistencyFn::semi_hyperbolic(int d, int r)
{
  ConsistencyFn c;
  c.kind = Kind::semi_hyperbolic;
  c.d = d;
  c.r = r;
  return c;
}

ConsistencyFn ConsistencyFn::linear(int d, ShapeDescriptor shape)
{
  ConsistencyFn c;
  c.kind = Kind::linear;
  c.d = d;
  c.shape = std::move(shape);
  return c;
}

bool ConsistencyFn::on_lattice() const
{
  return kind != Kind::wavelet_level && kind != Kind::tensor_hyp;
}

std::string ConsistencyFn::name() const
{
  switch (kind)
  {
  case Kind::standard_fourier: return "standard";
  case Kind::wavelet_level: return "leveled";
  case Kind::tensor_hyp: return "tensor_hyperbolic";
  case Kind::hyperbolic_n: return "hyperbolic_n";
  case Kind::hyperbolic_z: return "hyperbolic";
  case Kind::semi_hyperbolic: return "semi_hyperbolic_" + std::to_string(r);
  case Kind::linear:
    switch (shape.kind)
    {
    case ShapeDescriptor::Kind::l_inf: return "linear_linf";
    case ShapeDescriptor::Kind::l_2: return "linear_l2";
    case ShapeDescriptor::Kind::l_1: return "linear_l1";
    case ShapeDescriptor::Kind::polytope: return "linear_polytope";
    }
  }
  return "unknown";
}

void ConsistencyFn::validate() const
{
  require(d >= 1 && d <= max_dim, ErrorCode::invalid_argument, "ConsistencyFn: d must be in 1..5");
  if (kind == Kind::standard_fourier)
    require(d == 1, ErrorCode::invalid_argument, "ConsistencyFn: standard ordering is one-dimensional");
  if (kind == Kind::semi_hyperbolic)
    require(r >= 1 && r <= d, ErrorCode::invalid_argument, "ConsistencyFn: need 1 <= r <= d");
  if (kind == Kind::linear && shape.kind == ShapeDescriptor::Kind::polytope)
    require(!shape.vertices.empty() && static_cast<int>(shape.vertices.front().size()) == d,
            ErrorCode::invalid_argument, "ConsistencyFn: polytope dimension differs from d");
  if (!on_lattice())
  {
    require(J >= 0, ErrorCode::invalid_argument, "ConsistencyFn: J must be >= 0");
    require(p >= 1 && p <= 10, ErrorCode::unsupported_family, "ConsistencyFn: p must be in 1..10");
  }
}

double semi_hyperbolic_value(IntPoint const& n, int r)
{
  std::array<long, max_dim> v{};
  for (int i = 0; i < n.d; ++i)
    v[static_cast<std::size_t>(i)] = std::max(std::abs(n[i]), 1L);
  return top_r_product(v, n.d, r);
}

double eval_consistency(ConsistencyFn const& cons, IntPoint const& n)
{
  require(cons.on_lattice(), ErrorCode::type_mismatch,
          "eval_consistency: " + cons.name() + " expects a wavelet index");
  require(n.d == cons.d, ErrorCode::type_mismatch, "eval_consistency: dimension mismatch");
  switch (cons.kind)
  {
  case Kind::standard_fourier:
    return static_cast<double>(std::abs(n[0]));
  case Kind::hyperbolic_n:
  {
    double p = 1.0;
    for (int i = 0; i < n.d; ++i)
    {
      require(n[i] >= 1, ErrorCode::type_mismatch, "eval_consistency: hyperbolic_n needs n_i >= 1");
      p *= static_cast<double>(n[i]);
    }
    return p;
  }
  case Kind::hyperbolic_z:
    return semi_hyperbolic_value(n, n.d);
  case Kind::semi_hyperbolic:
    return semi_hyperbolic_value(n, cons.r);
  case Kind::linear:
    return shape_gauge(cons.shape, n);
  default:
    break;
  }
  fail(ErrorCode::type_mismatch, "eval_consistency: unsupported index kind");
}

double eval_consistency(ConsistencyFn const& cons, AnyIndex const& idx)
{
  if (auto const* n = std::get_if<IntPoint>(&idx))
    return eval_consistency(cons, *n);
  if (auto const* w = std::get_if<SeparableWaveletIndex>(&idx))
  {
    require(cons.kind == Kind::wavelet_level, ErrorCode::type_mismatch,
            "eval_consistency: " + cons.name() + " does not accept a separable wavelet index");
    return static_cast<double>(w->j);
  }
  auto const& t = std::get<TensorWaveletIndex>(idx);
  require(cons.kind == Kind::tensor_hyp, ErrorCode::type_mismatch,
          "eval_consistency: " + cons.name() + " does not accept a tensor wavelet index");
  return static_cast<double>(t.scale_sum());
}

void for_each_sublevel(ConsistencyFn const& cons, double K,
                       std::function<void(IntPoint const&)> const& visit)
{
  cons.validate();
  require(cons.on_lattice(), ErrorCode::type_mismatch,
          "for_each_sublevel: wavelet orderings have no lattice sublevel sets");
  if (K < 0.0)
    return;
  switch (cons.kind)
  {
  case Kind::standard_fourier:
    enumerate_box(1, floor_threshold(K), visit);
    return;
  case Kind::hyperbolic_n:
    enumerate_hyperbolic_n(cons.d, floor_threshold(K), visit);
    return;
  case Kind::hyperbolic_z:
    enumerate_magnitudes(cons.d, cons.d, floor_threshold(K), visit);
    return;
  case Kind::semi_hyperbolic:
    enumerate_magnitudes(cons.d, cons.r, floor_threshold(K), visit);
    return;
  case Kind::linear:
    switch (cons.shape.kind)
    {
    case ShapeDescriptor::Kind::l_inf:
      enumerate_box(cons.d, floor_threshold(K), visit);
      return;
    case ShapeDescriptor::Kind::l_1:
      enumerate_l1(cons.d, floor_threshold(K), visit);
      return;
    case ShapeDescriptor::Kind::l_2:
    {
      long const K2 = static_cast<long>(std::floor(K * K)) + 1;
      enumerate_l2(cons.d, K2, [&](IntPoint const& n) {
        if (shape_gauge(cons.shape, n) <= K)
          visit(n);
      });
      return;
    }
    case ShapeDescriptor::Kind::polytope:
    {
      double rho = 0.0;
      for (auto const& v : cons.shape.vertices)
        for (double c : v)
          rho = std::max(rho, std::abs(c));
      enumerate_box(cons.d, floor_threshold(K * rho), [&](IntPoint const& n) {
        if (shape_gauge(cons.shape, n) <= K)
          visit(n);
      });
      return;
    }
    }
    return;
  default:
    return;
  }
}

long long hyperbolic_count_n(int d, long long N)
{
  require(d >= 1, ErrorCode::invalid_argument, "hyperbolic_count_n: d must be >= 1");
  std::map<std::pair<int, long long>, long long> memo;
  std::function<long long(int, long long)> S = [&](int dim, long long n) -> long long {
    if (n < 1)
      return 0;
    if (dim == 1)
      return n;
    auto key = std::make_pair(dim, n);
    if (auto it = memo.find(key); it != memo.end())
      return it->second;
    long long total = 0;
    for (long long i = 1; i <= n;)
    {
      long long const q = n / i;
      long long const last = n / q;
      total += (last - i + 1) * S(dim - 1, q);
      i = last + 1;
    }
    memo.emplace(key, total);
    return total;
  };
  return S(d, N);
}

long long hyperbolic_count_z(int d, long long N)
{
  require(d >= 0, ErrorCode::invalid_argument, "hyperbolic_count_z: d must be >= 0");
  std::map<std::pair<int, long long>, long long> memo;
  std::function<long long(int, long long)> R = [&](int dim, long long n) -> long long {
    if (n < 1)
      return 0;
    if (dim == 0)
      return 1;
    auto key = std::make_pair(dim, n);
    if (auto it = memo.find(key); it != memo.end())
      return it->second;
    long long total = 3 * R(dim - 1, n);
    for (long long i = 2; i <= n;)
    {
      long long const q = n / i;
      long long const last = n / q;
      total += 2 * (last - i + 1) * R(dim - 1, q);
      i = last + 1;
    }
    memo.emplace(key, total);
    return total;
  };
  return R(d, N);
}

long long count_sublevel(ConsistencyFn const& cons, double K)
{
  cons.validate();
  if (K < 0.0)
    return 0;
  switch (cons.kind)
  {
  case Kind::hyperbolic_n:
    return hyperbolic_count_n(cons.d, floor_threshold(K));
  case Kind::hyperbolic_z:
    return hyperbolic_count_z(cons.d, floor_threshold(K));
  case Kind::semi_hyperbolic:
    if (cons.r == cons.d)
      return hyperbolic_count_z(cons.d, floor_threshold(K));
    break;
  case Kind::standard_fourier:
    return 2 * floor_threshold(K) + 1;
  case Kind::linear:
    if (cons.shape.kind == ShapeDescriptor::Kind::l_inf)
    {
      long long n = 1;
      for (int i = 0; i < cons.d; ++i)
        n *= 2 * floor_threshold(K) + 1;
      return n;
    }
    break;
  case Kind::wavelet_level:
  {
    BasisConfig const cfg = wavelet_cfg(cons);
    long long total = 0;
    for (int j = cons.J; j <= floor_threshold(K); ++j)
      total += separable_level_size(cfg, j);
    return total;
  }
  case Kind::tensor_hyp:
  {
    long long total = 0;
    for (int t = cons.d * cons.J; t <= floor_threshold(K); ++t)
      for (auto const& [s, j] : tensor_types(cons.d, cons.J, t))
        total += tensor_type_size(cons.d, cons.p, j);
    return total;
  }
  }
  long long n = 0;
  for_each_sublevel(cons, K, [&n](IntPoint const&) { ++n; });
  return n;
}

std::vector<IntPoint> lattice_prefix(ConsistencyFn const& cons, long long N, long long budget)
{
  cons.validate();
  require(cons.on_lattice(), ErrorCode::type_mismatch, "lattice_prefix: not a lattice ordering");
  require(N >= 1, ErrorCode::invalid_argument, "lattice_prefix: N must be >= 1");
  require(N <= budget, ErrorCode::capacity, "lattice_prefix: N exceeds the budget");

  bool const l2 = cons.kind == Kind::linear && cons.shape.kind == ShapeDescriptor::Kind::l_2;
  auto threshold = [&](double t) { return l2 ? std::sqrt(t) : t; };

  double K = 0.0;
  if (integer_valued(cons) || l2)
  {
    // integer search on K (or on K^2 for the Euclidean ball)
    long long hi = 1;
    while (count_sublevel(cons, threshold(static_cast<double>(hi))) < N)
    {
      require(hi < (1LL << 60), ErrorCode::capacity, "lattice_prefix: threshold overflow");
      hi *= 2;
    }
    long long lo = 0;
    if (count_sublevel(cons, threshold(0.0)) >= N)
      hi = 0;
    while (hi - lo > 1)
    {
      long long const mid = lo + (hi - lo) / 2;
      if (count_sublevel(cons, threshold(static_cast<double>(mid))) >= N)
        hi = mid;
      else
        lo = mid;
    }
    K = threshold(static_cast<double>(hi));
  }
  else
  {
    double hi = 1.0;
    while (count_sublevel(cons, hi) < N)
      hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 40; ++it)
    {
      double const mid = 0.5 * (lo + hi);
      if (count_sublevel(cons, mid) >= N)
        hi = mid;
      else
        lo = mid;
    }
    K = hi;
  }

  long long const total = count_sublevel(cons, K);
  require(total <= budget, ErrorCode::capacity, "lattice_prefix: sublevel set exceeds the budget");
  std::vector<std::pair<double, IntPoint>> pts;
  pts.reserve(static_cast<std::size_t>(total));
  for_each_sublevel(cons, K, [&](IntPoint const& n) { pts.emplace_back(eval_consistency(cons, n), n); });
  auto const cut = pts.begin() + static_cast<std::ptrdiff_t>(N);
  auto const cmp = [](auto const& a, auto const& b) {
    if (a.first != b.first)
      return a.first < b.first;
    return a.second < b.second;
  };
  std::partial_sort(pts.begin(), cut, pts.end(), cmp);
  std::vector<IntPoint> out;
  out.reserve(static_cast<std::size_t>(N));
  for (auto it = pts.begin(); it != cut; ++it)
    out.push_back(it->second);
  return out;
}

std::vector<SeparableWaveletIndex> separable_prefix(BasisConfig const& cfg, long long N)
{
  cfg.validate();
  require(N >= 1, ErrorCode::invalid_argument, "separable_prefix: N must be >= 1");
  require(N <= cfg.budget, ErrorCode::capacity, "separable_prefix: N exceeds the budget");
  std::vector<SeparableWaveletIndex> out;
  out.reserve(static_cast<std::size_t>(N));
  for (int j = cfg.J; static_cast<long long>(out.size()) < N; ++j)
  {
    auto level = enumerate_separable_level(cfg, j);
    for (auto& w : level)
    {
      if (static_cast<long long>(out.size()) == N)
        break;
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::vector<TensorWaveletIndex> tensor_prefix(BasisConfig const& cfg, long long N)
{
  cfg.validate();
  require(N >= 1, ErrorCode::invalid_argument, "tensor_prefix: N must be >= 1");
  require(N <= cfg.budget, ErrorCode::capacity, "tensor_prefix: N exceeds the budget");
  std::vector<TensorWaveletIndex> out;
  out.reserve(static_cast<std::size_t>(N));
  int const d = cfg.d;
  for (int t = d * cfg.J; static_cast<long long>(out.size()) < N; ++t)
  {
    require(t < d * cfg.J + 64, ErrorCode::capacity, "tensor_prefix: scale sum too large");
    for (auto const& [s, j] : tensor_types(d, cfg.J, t))
    {
      TensorWaveletIndex w;
      w.s = s;
      w.j = j;
      w.k = IntPoint::zeros(d);
      std::array<TranslationRange, max_dim> tr{};
      for (int i = 0; i < d; ++i)
      {
        tr[static_cast<std::size_t>(i)] = translation_range(cfg.fam.p, j[static_cast<std::size_t>(i)]);
        w.k[i] = tr[static_cast<std::size_t>(i)].lo;
      }
      while (true)
      {
        if (static_cast<long long>(out.size()) == N)
          return out;
        out.push_back(w);
        int ax = d - 1;
        while (ax >= 0 && w.k[ax] == tr[static_cast<std::size_t>(ax)].hi)
        {
          w.k[ax] = tr[static_cast<std::size_t>(ax)].lo;
          --ax;
        }
        if (ax < 0)
          break;
        ++w.k[ax];
      }
    }
  }
  return out;
}

std::vector<AnyIndex> generate_prefix(ConsistencyFn const& cons, long long N, long long budget)
{
  std::vector<AnyIndex> out;
  if (cons.on_lattice())
  {
    for (auto& p : lattice_prefix(cons, N, budget))
      out.emplace_back(p);
    return out;
  }
  cons.validate();
  BasisConfig cfg = wavelet_cfg(cons);
  cfg.budget = budget;
  if (cons.kind == Kind::wavelet_level)
    for (auto& w : separable_prefix(cfg, N))
      out.emplace_back(w);
  else
    for (auto& w : tensor_prefix(cfg, N))
      out.emplace_back(w);
  return out;
}

OrderingEnum OrderingEnum::build(ConsistencyFn const& cons, long long N)
{
  return {cons, lattice_prefix(cons, N)};
}

IntPoint const& OrderingEnum::at(long long rank) const
{
  require(rank >= 1 && rank <= size(), ErrorCode::invalid_argument,
          "OrderingEnum: rank " + std::to_string(rank) + " outside the materialised prefix");
  return points[static_cast<std::size_t>(rank - 1)];
}

double h_d(double x, int d)
{
  require(d >= 1, ErrorCode::invalid_argument, "h_d: d must be >= 1");
  require(x >= 1.0, ErrorCode::invalid_argument, "h_d: x must be >= 1");
  return x / std::pow(std::log(x + 1.0), d - 1);
}

double g_d(double x, int d)
{
  require(d >= 1, ErrorCode::invalid_argument, "g_d: d must be >= 1");
  if (d == 1)
    return x;
  require(x > 0.0, ErrorCode::invalid_argument, "g_d: x must be positive");
  auto f = [d](double y) { return y * std::pow(std::log(y), d - 1); };
  double lo = 1.0, hi = 2.0;
  while (f(hi) < x)
    hi *= 2.0;
  while ((hi - lo) > 1e-12 * hi)
  {
    double const mid = 0.5 * (lo + hi);
    (f(mid) < x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> verify_hyperbolic_asymptotics(int d, std::span<double const> x_grid)
{
  std::vector<double> out;
  out.reserve(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i)
  {
    require(x_grid[i] >= 10.0, ErrorCode::invalid_argument, "verify_hyperbolic_asymptotics: x must be >= 10");
    require(i == 0 || x_grid[i] > x_grid[i - 1], ErrorCode::invalid_argument,
            "verify_hyperbolic_asymptotics: grid must be increasing");
    out.push_back(d == 1 ? 1.0 : g_d(x_grid[i], d) / h_d(x_grid[i], d));
  }
  return out;
}

} // namespace cohere
