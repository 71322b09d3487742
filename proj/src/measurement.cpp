#include "cohere/measurement.hpp"

#include "cohere/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>

namespace cohere
{
namespace
{
constexpr double pi = std::numbers::pi;

std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}

std::size_t wrap(long k, long n)
{
  long r = k % n;
  if (r < 0)
    r += n;
  return static_cast<std::size_t>(r);
}

// In-place unnormalised DFT of an n^d complex array (axis 0 fastest).
void dft_inplace(std::vector<cplx>& a, int d, long n, int sign)
{
  std::vector<int> dims(static_cast<std::size_t>(d), static_cast<int>(n));
  auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * a.size()));
  require(buf != nullptr, ErrorCode::capacity, "dft: allocation failed");
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(d, dims.data(), buf, buf, sign, FFTW_ESTIMATE);
  }
  std::memcpy(buf, a.data(), sizeof(fftw_complex) * a.size());
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(a.data()), buf, sizeof(fftw_complex) * a.size());
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
}

} // namespace

struct FourierOperator::Plan
{
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_complex* buf = nullptr;
  mutable std::vector<cplx> work;
};

HaarGrid ReconBasis::grid() const
{
  return {d, n, 2L << J, layout};
}

BasisConfig ReconBasis::config() const
{
  BasisConfig cfg;
  cfg.d = d;
  cfg.fam = build_family(1);
  cfg.J = J;
  cfg.eps = 0.5;
  return cfg;
}

void ReconBasis::validate() const
{
  require(J >= 0 && J < 30, ErrorCode::invalid_argument, "ReconBasis: J out of range");
  grid().validate();
}

cplx cell_factor(double eps, long n, long k)
{
  double const h = 2.0 / static_cast<double>(n);
  if (k == 0)
    return h;
  double const kk = static_cast<double>(k);
  double const theta = 2.0 * pi * eps * kk * h;
  double const shift = 2.0 * pi * std::fmod(eps * kk, 1.0);
  return std::polar(std::sin(theta / 2.0) / (pi * eps * kk), shift - theta / 2.0);
}

FourierOperator::FourierOperator(ReconBasis basis, std::vector<IntPoint> freqs)
    : basis_(basis), freqs_(std::move(freqs)), plan_(std::make_unique<Plan>())
{
  basis_.validate();
  double const eps = 0.5;
  double const h = 2.0 / static_cast<double>(basis_.n);
  double const scale = std::pow(eps, basis_.d / 2.0) * std::pow(h, -basis_.d / 2.0);
  gather_.reserve(freqs_.size());
  weight_.reserve(freqs_.size());
  for (auto const& k : freqs_)
  {
    require(k.d == basis_.d, ErrorCode::invalid_argument, "FourierOperator: frequency dimension mismatch");
    std::size_t off = 0, stride = 1;
    cplx w = scale;
    for (int i = 0; i < basis_.d; ++i)
    {
      off += wrap(k[i], basis_.n) * stride;
      stride *= static_cast<std::size_t>(basis_.n);
      w *= cell_factor(eps, basis_.n, k[i]);
    }
    gather_.push_back(off);
    weight_.push_back(w);
  }

  std::size_t const R = basis_.size();
  plan_->buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * R));
  require(plan_->buf != nullptr, ErrorCode::capacity, "FourierOperator: allocation failed");
  plan_->work.resize(R);
  std::vector<int> dims(static_cast<std::size_t>(basis_.d), static_cast<int>(basis_.n));
  std::lock_guard lock(planner_mutex());
  plan_->forward = fftw_plan_dft(basis_.d, dims.data(), plan_->buf, plan_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_->backward = fftw_plan_dft(basis_.d, dims.data(), plan_->buf, plan_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FourierOperator::~FourierOperator()
{
  if (!plan_)
    return;
  std::lock_guard lock(planner_mutex());
  if (plan_->forward)
    fftw_destroy_plan(plan_->forward);
  if (plan_->backward)
    fftw_destroy_plan(plan_->backward);
  if (plan_->buf)
    fftw_free(plan_->buf);
}

Eigen::VectorXcd FourierOperator::apply(Eigen::VectorXcd const& x) const
{
  require(x.size() == cols(), ErrorCode::invalid_argument, "FourierOperator::apply: size mismatch");
  auto& work = plan_->work;
  std::copy(x.data(), x.data() + x.size(), work.begin());
  haar_synthesize(basis_.grid(), work);
  std::memcpy(plan_->buf, work.data(), sizeof(fftw_complex) * work.size());
  fftw_execute(plan_->forward);
  auto const* spec = reinterpret_cast<cplx const*>(plan_->buf);
  Eigen::VectorXcd y(rows());
  for (Eigen::Index q = 0; q < rows(); ++q)
    y[q] = weight_[static_cast<std::size_t>(q)] * spec[gather_[static_cast<std::size_t>(q)]];
  return y;
}

Eigen::VectorXcd FourierOperator::adjoint(Eigen::VectorXcd const& y) const
{
  require(y.size() == rows(), ErrorCode::invalid_argument, "FourierOperator::adjoint: size mismatch");
  auto* spec = reinterpret_cast<cplx*>(plan_->buf);
  std::fill(spec, spec + cols(), cplx(0.0));
  for (Eigen::Index q = 0; q < rows(); ++q)
    spec[gather_[static_cast<std::size_t>(q)]] += std::conj(weight_[static_cast<std::size_t>(q)]) * y[q];
  fftw_execute(plan_->backward);
  auto& work = plan_->work;
  std::memcpy(static_cast<void*>(work.data()), plan_->buf, sizeof(fftw_complex) * work.size());
  haar_analyze(basis_.grid(), work);
  return Eigen::Map<Eigen::VectorXcd const>(work.data(), cols());
}

Eigen::MatrixXcd dense_matrix(ReconBasis const& basis, std::vector<IntPoint> const& freqs)
{
  basis.validate();
  HaarGrid const g = basis.grid();
  BasisConfig const cfg = basis.config();
  auto const R = static_cast<Eigen::Index>(g.size());
  require(R * static_cast<Eigen::Index>(freqs.size()) <= 50'000'000, ErrorCode::capacity,
          "dense_matrix: matrix too large");
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(freqs.size()), R);
  for (Eigen::Index c = 0; c < R; ++c)
  {
    if (basis.layout == Layout::separable)
    {
      SeparableWaveletIndex const w = separable_at(g, basis.J, static_cast<std::size_t>(c));
      for (std::size_t r = 0; r < freqs.size(); ++r)
        A(static_cast<Eigen::Index>(r), c) = inner_product_sep(cfg, w, freqs[r]);
    }
    else
    {
      TensorWaveletIndex const w = tensor_at(g, basis.J, static_cast<std::size_t>(c));
      for (std::size_t r = 0; r < freqs.size(); ++r)
        A(static_cast<Eigen::Index>(r), c) = inner_product_tensor(cfg, w, freqs[r]);
    }
  }
  return A;
}

Eigen::VectorXcd simulate_measurements(ImageSource const& src, std::vector<IntPoint> const& freqs, double eps,
                                       long base_n, int oversample)
{
  require(oversample >= 2, ErrorCode::invalid_argument, "simulate_measurements: oversample must be >= 2");
  require(eps > 0.0 && eps <= 0.5, ErrorCode::invalid_argument, "simulate_measurements: eps must lie in (0, 1/2]");
  require(base_n >= 1, ErrorCode::invalid_argument, "simulate_measurements: base resolution must be >= 1");
  int const d = source_dim(src);
  long const nf = base_n * oversample;
  double const band = static_cast<double>(nf) / (4.0 * eps);
  for (auto const& k : freqs)
  {
    require(k.d == d, ErrorCode::invalid_argument, "simulate_measurements: frequency dimension mismatch");
    for (int i = 0; i < d; ++i)
      require(std::abs(static_cast<double>(k[i])) <= band, ErrorCode::invalid_argument,
              "simulate_measurements: frequency " + k.str() + " outside the oversampled band");
  }
  Raster const fine = cell_average(src, nf);
  double const norm = std::pow(eps, d / 2.0);
  Eigen::VectorXcd y(static_cast<Eigen::Index>(freqs.size()));

  auto factor = [&](IntPoint const& k) {
    cplx w = norm;
    for (int i = 0; i < d; ++i)
      w *= cell_factor(eps, nf, k[i]);
    return w;
  };

  if (std::abs(2.0 * eps - 1.0) < 1e-15)
  {
    std::vector<cplx> a(fine.v.begin(), fine.v.end());
    dft_inplace(a, d, nf, FFTW_FORWARD);
    for (std::size_t q = 0; q < freqs.size(); ++q)
    {
      std::size_t off = 0, stride = 1;
      for (int i = 0; i < d; ++i)
      {
        off += wrap(freqs[q][i], nf) * stride;
        stride *= static_cast<std::size_t>(nf);
      }
      y[static_cast<Eigen::Index>(q)] = factor(freqs[q]) * a[off];
    }
    return y;
  }

  // Direct separable sums: contract one axis at a time onto the distinct frequencies.
  std::vector<std::vector<long>> vals(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
  {
    auto& v = vals[static_cast<std::size_t>(i)];
    for (auto const& k : freqs)
      v.push_back(k[i]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  std::vector<std::size_t> shape(static_cast<std::size_t>(d), static_cast<std::size_t>(nf));
  std::vector<cplx> cur(fine.v.begin(), fine.v.end());
  double const step = 2.0 * eps * 2.0 / static_cast<double>(nf); // eps * h * 2
  for (int ax = 0; ax < d; ++ax)
  {
    auto const& v = vals[static_cast<std::size_t>(ax)];
    std::size_t inner = 1;
    for (int i = 0; i < ax; ++i)
      inner *= shape[static_cast<std::size_t>(i)];
    std::size_t outer = 1;
    for (int i = ax + 1; i < d; ++i)
      outer *= shape[static_cast<std::size_t>(i)];
    std::size_t const len = shape[static_cast<std::size_t>(ax)];
    std::vector<cplx> E(v.size() * len);
    for (std::size_t a = 0; a < v.size(); ++a)
      for (std::size_t m = 0; m < len; ++m)
        E[a * len + m] = std::polar(1.0, -pi * std::fmod(step * static_cast<double>(v[a]) * static_cast<double>(m), 2.0));
    std::vector<cplx> next(inner * v.size() * outer, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t m = 0; m < len; ++m)
        {
          cplx const e = E[a * len + m];
          cplx const* src_row = cur.data() + (o * len + m) * inner;
          cplx* dst_row = next.data() + (o * v.size() + a) * inner;
          for (std::size_t t = 0; t < inner; ++t)
            dst_row[t] += e * src_row[t];
        }
    cur = std::move(next);
    shape[static_cast<std::size_t>(ax)] = v.size();
  }
  for (std::size_t q = 0; q < freqs.size(); ++q)
  {
    std::size_t off = 0, stride = 1;
    for (int i = 0; i < d; ++i)
    {
      auto const& v = vals[static_cast<std::size_t>(i)];
      off += static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), freqs[q][i]) - v.begin()) * stride;
      stride *= shape[static_cast<std::size_t>(i)];
    }
    y[static_cast<Eigen::Index>(q)] = factor(freqs[q]) * cur[off];
  }
  return y;
}

Raster synthesize(ReconBasis const& basis, Eigen::VectorXcd const& x, long resolution)
{
  basis.validate();
  require(x.size() == static_cast<Eigen::Index>(basis.size()), ErrorCode::invalid_argument,
          "synthesize: coefficient count does not match the basis");
  require(resolution >= basis.n && resolution % basis.n == 0, ErrorCode::invalid_argument,
          "synthesize: resolution too coarse for the finest level (need a multiple of " + std::to_string(basis.n) + ")");
  std::vector<cplx> work(x.data(), x.data() + x.size());
  haar_synthesize(basis.grid(), work);
  double const h = 2.0 / static_cast<double>(basis.n);
  double const scale = std::pow(h, -basis.d / 2.0);
  Raster base = Raster::zeros(basis.d, basis.n);
  for (std::size_t i = 0; i < work.size(); ++i)
    base.v[i] = scale * work[i].real();
  if (resolution == basis.n)
    return base;
  return cell_average(base, resolution);
}

Eigen::VectorXcd analyze(ReconBasis const& basis, Raster const& image)
{
  basis.validate();
  require(image.d == basis.d && image.n == basis.n, ErrorCode::invalid_argument,
          "analyze: raster shape does not match the basis");
  double const h = 2.0 / static_cast<double>(basis.n);
  double const scale = std::pow(h, basis.d / 2.0);
  std::vector<cplx> work(image.v.size());
  for (std::size_t i = 0; i < work.size(); ++i)
    work[i] = scale * image.v[i];
  haar_analyze(basis.grid(), work);
  return Eigen::Map<Eigen::VectorXcd const>(work.data(), static_cast<Eigen::Index>(work.size()));
}

} // namespace cohere
