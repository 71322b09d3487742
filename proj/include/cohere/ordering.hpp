#pragma once

#include "cohere/basis.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace cohere
{
/// Scaling shape for linear orderings: bounded, origin in the interior.
struct ShapeDescriptor
{
  enum class Kind
  {
    l_inf,
    l_2,
    l_1,
    polytope
  };
  Kind kind = Kind::l_inf;
  /// Polytope vertices (each of length d); convex hull must contain 0 strictly inside.
  std::vector<std::vector<double>> vertices;

  static ShapeDescriptor box() { return {}; }
  static ShapeDescriptor ball() { return {Kind::l_2, {}}; }
  static ShapeDescriptor diamond() { return {Kind::l_1, {}}; }
  static ShapeDescriptor from_vertices(std::vector<std::vector<double>> v);
};

struct ConsistencyFn
{
  enum class Kind
  {
    standard_fourier, // |k| on Z
    wavelet_level,    // j of a separable element
    tensor_hyp,       // sum_i j_i of a tensor element
    hyperbolic_n,     // prod n_i on N^d
    hyperbolic_z,     // prod max(|n_i|, 1) on Z^d
    semi_hyperbolic,  // largest product of r factors max(|n_i|, 1)
    linear            // gauge of the scaling shape
  };
  Kind kind = Kind::standard_fourier;
  int d = 1;
  int r = 1;
  ShapeDescriptor shape;
  /// Wavelet orderings only.
  int J = 0;
  int p = 1;

  static ConsistencyFn standard();
  static ConsistencyFn leveled(BasisConfig const& cfg);
  static ConsistencyFn tensor_hyperbolic(BasisConfig const& cfg);
  static ConsistencyFn hyperbolic_n(int d);
  static ConsistencyFn hyperbolic_z(int d);
  static ConsistencyFn semi_hyperbolic(int d, int r);
  static ConsistencyFn linear(int d, ShapeDescriptor shape);

  bool on_lattice() const;
  std::string name() const;
  void validate() const;
};

using AnyIndex = std::variant<IntPoint, SeparableWaveletIndex, TensorWaveletIndex>;

double eval_consistency(ConsistencyFn const& cons, AnyIndex const& idx);
double eval_consistency(ConsistencyFn const& cons, IntPoint const& n);

/// Gauge of a polytope shape at x: min { t >= 0 : x in t D }.
double polytope_gauge(ShapeDescriptor const& shape, std::span<double const> x);

/// H_{d,r}(n): product of the r largest values max(|n_i|, 1).
double semi_hyperbolic_value(IntPoint const& n, int r);

/// Visits every lattice point with cons(n) <= K (unordered).
void for_each_sublevel(ConsistencyFn const& cons, double K,
                       std::function<void(IntPoint const&)> const& visit);

/// Exact #{idx : cons(idx) <= K}.
long long count_sublevel(ConsistencyFn const& cons, double K);

/// S_d(N) = #{m in N^d : prod m_i <= N}.
long long hyperbolic_count_n(int d, long long N);
/// R_d(N) = #{n in Z^d : prod max(|n_i|,1) <= N}.
long long hyperbolic_count_z(int d, long long N);

/// First N elements of the ordering consistent with cons, lexicographic tie-break.
std::vector<IntPoint> lattice_prefix(ConsistencyFn const& cons, long long N,
                                     long long budget = 50'000'000);
std::vector<SeparableWaveletIndex> separable_prefix(BasisConfig const& cfg, long long N);
std::vector<TensorWaveletIndex> tensor_prefix(BasisConfig const& cfg, long long N);

std::vector<AnyIndex> generate_prefix(ConsistencyFn const& cons, long long N,
                                      long long budget = 50'000'000);

/// Materialised prefix of a lattice ordering plus its rank lookup.
struct OrderingEnum
{
  ConsistencyFn cons;
  std::vector<IntPoint> points;

  static OrderingEnum build(ConsistencyFn const& cons, long long N);
  long long size() const { return static_cast<long long>(points.size()); }
  /// 1-based rank.
  IntPoint const& at(long long rank) const;
};

/// x / ln^{d-1}(x + 1).
double h_d(double x, int d);
/// Inverse of y ln^{d-1}(y) on [e^{d-1}, inf) (y >= 1 for d = 1), by bisection.
double g_d(double x, int d);
/// g_d(x) / h_d(x) for each x.
std::vector<double> verify_hyperbolic_asymptotics(int d, std::span<double const> x_grid);

} // namespace cohere
