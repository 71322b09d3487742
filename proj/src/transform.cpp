#include "cohere/transform.hpp"

#include "cohere/error.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace cohere
{
namespace
{
constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

// Applies one Haar step along `axis` to every line of the sub-box [0, m)^d.
template <class T>
void step_box(std::vector<T>& a, int d, long n, int axis, long m, bool forward, std::vector<T>& line)
{
  std::size_t stride = 1;
  for (int i = 0; i < axis; ++i)
    stride *= static_cast<std::size_t>(n);
  line.resize(static_cast<std::size_t>(m));
  long const half = m / 2;

  // iterate over all index tuples of the other axes within [0, m)
  std::array<long, max_dim> idx{};
  while (true)
  {
    std::size_t base = 0, s = 1;
    for (int i = 0; i < d; ++i)
    {
      if (i != axis)
        base += static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]) * s;
      s *= static_cast<std::size_t>(n);
    }
    T* p = a.data() + base;
    if (forward)
    {
      for (long i = 0; i < half; ++i)
      {
        T const x0 = p[static_cast<std::size_t>(2 * i) * stride], x1 = p[static_cast<std::size_t>(2 * i + 1) * stride];
        line[static_cast<std::size_t>(i)] = (x0 + x1) * inv_sqrt2;
        line[static_cast<std::size_t>(half + i)] = (x0 - x1) * inv_sqrt2;
      }
    }
    else
    {
      for (long i = 0; i < half; ++i)
      {
        T const lo = p[static_cast<std::size_t>(i) * stride], hi = p[static_cast<std::size_t>(half + i) * stride];
        line[static_cast<std::size_t>(2 * i)] = (lo + hi) * inv_sqrt2;
        line[static_cast<std::size_t>(2 * i + 1)] = (lo - hi) * inv_sqrt2;
      }
    }
    for (long i = 0; i < m; ++i)
      p[static_cast<std::size_t>(i) * stride] = line[static_cast<std::size_t>(i)];

    int ax = 0;
    while (ax < d)
    {
      if (ax == axis)
      {
        ++ax;
        continue;
      }
      if (++idx[static_cast<std::size_t>(ax)] < m)
        break;
      idx[static_cast<std::size_t>(ax)] = 0;
      ++ax;
    }
    if (ax >= d)
      break;
  }
}

// Same as step_box but the box spans the full extent n on every axis other than `axis`.
template <class T>
void step_lines(std::vector<T>& a, int /*d*/, long n, int axis, long m, bool forward, std::vector<T>& line)
{
  std::size_t stride = 1;
  for (int i = 0; i < axis; ++i)
    stride *= static_cast<std::size_t>(n);
  line.resize(static_cast<std::size_t>(m));
  long const half = m / 2;
  std::size_t const block = stride * static_cast<std::size_t>(n);
  std::size_t const outer = a.size() / block;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t inner = 0; inner < stride; ++inner)
    {
      T* p = a.data() + o * block + inner;
      if (forward)
        for (long i = 0; i < half; ++i)
        {
          T const x0 = p[static_cast<std::size_t>(2 * i) * stride], x1 = p[static_cast<std::size_t>(2 * i + 1) * stride];
          line[static_cast<std::size_t>(i)] = (x0 + x1) * inv_sqrt2;
          line[static_cast<std::size_t>(half + i)] = (x0 - x1) * inv_sqrt2;
        }
      else
        for (long i = 0; i < half; ++i)
        {
          T const lo = p[static_cast<std::size_t>(i) * stride], hi = p[static_cast<std::size_t>(half + i) * stride];
          line[static_cast<std::size_t>(2 * i)] = (lo + hi) * inv_sqrt2;
          line[static_cast<std::size_t>(2 * i + 1)] = (lo - hi) * inv_sqrt2;
        }
      for (long i = 0; i < m; ++i)
        p[static_cast<std::size_t>(i) * stride] = line[static_cast<std::size_t>(i)];
    }
}

template <class T>
void analyze(HaarGrid const& g, std::vector<T>& a)
{
  g.validate();
  require(a.size() == g.size(), ErrorCode::invalid_argument, "haar_analyze: size mismatch");
  std::vector<T> line;
  if (g.layout == Layout::separable)
  {
    for (long m = g.n; m > g.coarse; m /= 2)
      for (int ax = 0; ax < g.d; ++ax)
        step_box(a, g.d, g.n, ax, m, true, line);
  }
  else
  {
    for (int ax = 0; ax < g.d; ++ax)
      for (long m = g.n; m > g.coarse; m /= 2)
        step_lines(a, g.d, g.n, ax, m, true, line);
  }
}

template <class T>
void synthesize(HaarGrid const& g, std::vector<T>& a)
{
  g.validate();
  require(a.size() == g.size(), ErrorCode::invalid_argument, "haar_synthesize: size mismatch");
  std::vector<T> line;
  if (g.layout == Layout::separable)
  {
    for (long m = 2 * g.coarse; m <= g.n; m *= 2)
      for (int ax = 0; ax < g.d; ++ax)
        step_box(a, g.d, g.n, ax, m, false, line);
  }
  else
  {
    for (int ax = 0; ax < g.d; ++ax)
      for (long m = 2 * g.coarse; m <= g.n; m *= 2)
        step_lines(a, g.d, g.n, ax, m, false, line);
  }
}

// Scaling phi_{j,k} sits at k + 2^j, wavelet psi_{j,k} at 2^{j+1} + k + 2^j.
long axis_position(int s, int j, long k)
{
  long const two_j = 1L << j;
  return s == 0 ? k + two_j : 3 * two_j + k;
}

} // namespace

std::size_t HaarGrid::size() const
{
  std::size_t c = 1;
  for (int i = 0; i < d; ++i)
    c *= static_cast<std::size_t>(n);
  return c;
}

void HaarGrid::validate() const
{
  require(d >= 1 && d <= max_dim, ErrorCode::invalid_argument, "HaarGrid: d must be in 1..5");
  require(n >= 2 && std::has_single_bit(static_cast<unsigned long>(n)), ErrorCode::invalid_argument,
          "HaarGrid: n must be a power of two");
  require(coarse >= 1 && coarse <= n && std::has_single_bit(static_cast<unsigned long>(coarse)),
          ErrorCode::invalid_argument, "HaarGrid: coarse must be a power of two not exceeding n");
}

void haar_analyze(HaarGrid const& g, std::vector<cplx>& data) { analyze(g, data); }
void haar_synthesize(HaarGrid const& g, std::vector<cplx>& data) { synthesize(g, data); }
void haar_analyze(HaarGrid const& g, std::vector<double>& data) { analyze(g, data); }
void haar_synthesize(HaarGrid const& g, std::vector<double>& data) { synthesize(g, data); }

std::size_t coefficient_offset(HaarGrid const& g, SeparableWaveletIndex const& w)
{
  require(w.k.d == g.d, ErrorCode::invalid_argument, "coefficient_offset: dimension mismatch");
  std::size_t off = 0, stride = 1;
  for (int i = 0; i < g.d; ++i)
  {
    long const q = axis_position(static_cast<int>((w.s >> i) & 1u), w.j, w.k[i]);
    require(q >= 0 && q < g.n, ErrorCode::invalid_argument, "coefficient_offset: element finer than the grid");
    off += static_cast<std::size_t>(q) * stride;
    stride *= static_cast<std::size_t>(g.n);
  }
  return off;
}

std::size_t coefficient_offset(HaarGrid const& g, TensorWaveletIndex const& w)
{
  require(w.k.d == g.d, ErrorCode::invalid_argument, "coefficient_offset: dimension mismatch");
  std::size_t off = 0, stride = 1;
  for (int i = 0; i < g.d; ++i)
  {
    long const q = axis_position(static_cast<int>((w.s >> i) & 1u), w.j[static_cast<std::size_t>(i)], w.k[i]);
    require(q >= 0 && q < g.n, ErrorCode::invalid_argument, "coefficient_offset: element finer than the grid");
    off += static_cast<std::size_t>(q) * stride;
    stride *= static_cast<std::size_t>(g.n);
  }
  return off;
}

SeparableWaveletIndex separable_at(HaarGrid const& g, int J, std::size_t offset)
{
  require(offset < g.size(), ErrorCode::invalid_argument, "separable_at: offset out of range");
  require(g.coarse == (2L << J), ErrorCode::invalid_argument, "separable_at: grid does not match J");
  std::array<long, max_dim> q{};
  int level = J;
  bool any_detail = false;
  for (int i = 0; i < g.d; ++i)
  {
    q[static_cast<std::size_t>(i)] = static_cast<long>(offset % static_cast<std::size_t>(g.n));
    offset /= static_cast<std::size_t>(g.n);
    if (q[static_cast<std::size_t>(i)] >= g.coarse)
    {
      any_detail = true;
      level = std::max(level, static_cast<int>(std::bit_width(static_cast<unsigned long>(q[static_cast<std::size_t>(i)]))) - 2);
    }
  }
  SeparableWaveletIndex w;
  w.k = IntPoint::zeros(g.d);
  w.j = level;
  long const two_j = 1L << level;
  for (int i = 0; i < g.d; ++i)
  {
    long const qi = q[static_cast<std::size_t>(i)];
    if (any_detail && qi >= 2 * two_j)
    {
      w.s |= 1u << i;
      w.k[i] = qi - 3 * two_j;
    }
    else
      w.k[i] = qi - two_j;
  }
  return w;
}

TensorWaveletIndex tensor_at(HaarGrid const& g, int J, std::size_t offset)
{
  require(offset < g.size(), ErrorCode::invalid_argument, "tensor_at: offset out of range");
  require(g.coarse == (2L << J), ErrorCode::invalid_argument, "tensor_at: grid does not match J");
  TensorWaveletIndex w;
  w.k = IntPoint::zeros(g.d);
  for (int i = 0; i < g.d; ++i)
  {
    long const q = static_cast<long>(offset % static_cast<std::size_t>(g.n));
    offset /= static_cast<std::size_t>(g.n);
    if (q < g.coarse)
    {
      w.j[static_cast<std::size_t>(i)] = J;
      w.k[i] = q - (1L << J);
    }
    else
    {
      int const j = static_cast<int>(std::bit_width(static_cast<unsigned long>(q))) - 2;
      w.s |= 1u << i;
      w.j[static_cast<std::size_t>(i)] = j;
      w.k[i] = q - 3 * (1L << j);
    }
  }
  return w;
}

} // namespace cohere
