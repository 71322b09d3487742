#include "cohere/solver.hpp"

#include "cohere/error.hpp"
#include "cohere/measurement.hpp"

#include <cmath>
#include <random>

namespace cohere
{
namespace
{
Eigen::VectorXcd random_vector(Eigen::Index n, std::mt19937_64& rng)
{
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = {g(rng), g(rng)};
  return v;
}

// Complex soft-thresholding on magnitudes.
void shrink(Eigen::VectorXcd& v, double t)
{
  for (Eigen::Index i = 0; i < v.size(); ++i)
  {
    double const a = std::abs(v[i]);
    v[i] = a <= t ? std::complex<double>(0.0) : v[i] * ((a - t) / a);
  }
}

} // namespace

void SolverConfig::validate() const
{
  require(max_iterations >= 1, ErrorCode::invalid_argument, "SolverConfig: max_iterations must be >= 1");
  require(tol_feas > 0.0 && tol_stagnation > 0.0, ErrorCode::invalid_argument,
          "SolverConfig: tolerances must be positive");
  require(tau >= 0.0 && sigma >= 0.0, ErrorCode::invalid_argument, "SolverConfig: step sizes must be nonnegative");
  require((tau == 0.0) == (sigma == 0.0), ErrorCode::invalid_argument,
          "SolverConfig: set both tau and sigma or neither");
  require(step_fraction > 0.0 && step_fraction < 1.0, ErrorCode::invalid_argument,
          "SolverConfig: step_fraction must lie in (0, 1)");
  require(step_ratio >= 0.0, ErrorCode::invalid_argument, "SolverConfig: step_ratio must be nonnegative");
  require(window >= 1, ErrorCode::invalid_argument, "SolverConfig: window must be >= 1");
  require(power_iterations >= 1, ErrorCode::invalid_argument, "SolverConfig: power_iterations must be >= 1");
}

LinearOperator make_operator(Eigen::MatrixXcd const& A)
{
  return {[&A](Eigen::VectorXcd const& x) -> Eigen::VectorXcd { return A * x; },
          [&A](Eigen::VectorXcd const& y) -> Eigen::VectorXcd { return A.adjoint() * y; }, A.rows(), A.cols()};
}

LinearOperator make_operator(FourierOperator const& op)
{
  return {[&op](Eigen::VectorXcd const& x) { return op.apply(x); },
          [&op](Eigen::VectorXcd const& y) { return op.adjoint(y); }, op.rows(), op.cols()};
}

double operator_norm(LinearOperator const& A, int iterations)
{
  require(A.rows >= 0 && A.cols >= 1, ErrorCode::invalid_argument, "operator_norm: empty operator");
  std::mt19937_64 rng(0x5eed);
  Eigen::VectorXcd v = random_vector(A.cols, rng);
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < iterations; ++it)
  {
    Eigen::VectorXcd w = A.adjoint(A.apply(v));
    double const nw = w.norm();
    if (nw == 0.0)
      return 0.0;
    double const next = std::sqrt(nw);
    v = w / nw;
    if (it > 5 && std::abs(next - est) <= 1e-10 * next)
      return next;
    est = next;
  }
  return est;
}

SolveResult basis_pursuit(LinearOperator const& A, Eigen::VectorXcd const& y, SolverConfig const& cfg)
{
  cfg.validate();
  require(y.size() == A.rows, ErrorCode::invalid_argument, "basis_pursuit: measurement count does not match operator");
  require(y.allFinite(), ErrorCode::invalid_argument, "basis_pursuit: measurements must be finite");

  SolveResult res;
  res.op_norm = operator_norm(A, cfg.power_iterations);
  res.x = Eigen::VectorXcd::Zero(A.cols);
  if (y.norm() <= cfg.tol_feas)
    return res;
  require(res.op_norm > 0.0, ErrorCode::numerical, "basis_pursuit: operator is zero but measurements are not");
  // 1% margin on the estimate keeps sigma tau ||A||^2 strictly below 1
  double const L = res.op_norm * 1.01;
  double tau = cfg.tau, sigma = cfg.sigma;
  if (tau == 0.0)
  {
    double const ratio =
        cfg.step_ratio > 0.0 ? cfg.step_ratio : 0.1 * y.norm() / (L * static_cast<double>(std::max<Eigen::Index>(A.rows, 1)));
    tau = cfg.step_fraction / L * std::sqrt(ratio);
    sigma = cfg.step_fraction / L / std::sqrt(ratio);
  }
  require(sigma * tau * L * L < 1.0, ErrorCode::invalid_argument,
          "basis_pursuit: step sizes violate sigma * tau * ||A||^2 < 1");

  double alpha = 0.5;
  double const eta = 0.95, delta = 1.5;
  Eigen::VectorXcd x = res.x, z = Eigen::VectorXcd::Zero(A.rows);
  Eigen::VectorXcd Ax = Eigen::VectorXcd::Zero(A.rows), Atz = Eigen::VectorXcd::Zero(A.cols);

  for (int it = 1; it <= cfg.max_iterations; ++it)
  {
    Eigen::VectorXcd xn = x - tau * Atz;
    shrink(xn, tau);
    Eigen::VectorXcd const Axn = A.apply(xn);
    Eigen::VectorXcd const zn = z + sigma * (2.0 * Axn - Ax - y);
    Eigen::VectorXcd const Atzn = A.adjoint(zn);

    double const feas = (Axn - y).norm();
    double const obj = xn.cwiseAbs().sum();
    res.residuals.push_back(feas);
    res.objectives.push_back(obj);

    if (cfg.adaptive)
    {
      double const p = ((x - xn) / tau - (Atz - Atzn)).norm();
      double const d = ((z - zn) / sigma - (Ax - Axn)).norm();
      if (p > delta * d)
      {
        tau /= 1.0 - alpha;
        sigma *= 1.0 - alpha;
        alpha *= eta;
      }
      else if (d > delta * p)
      {
        tau *= 1.0 - alpha;
        sigma /= 1.0 - alpha;
        alpha *= eta;
      }
    }

    x = xn;
    z = zn;
    Ax = Axn;
    Atz = Atzn;
    res.iterations = it;

    if (feas <= cfg.tol_feas && it > cfg.window)
    {
      double const past = res.objectives[res.objectives.size() - 1 - static_cast<std::size_t>(cfg.window)];
      if (std::abs(obj - past) <= cfg.tol_stagnation * std::max(1.0, obj))
      {
        res.x = x;
        return res;
      }
    }
    require(std::isfinite(feas), ErrorCode::numerical, "basis_pursuit: iteration diverged");
  }
  throw NonConvergenceError("basis_pursuit: no convergence after " + std::to_string(cfg.max_iterations) +
                                " iterations (final residual " + std::to_string(res.residuals.back()) + ")",
                            res.residuals);
}

double adjoint_mismatch(LinearOperator const& A, unsigned long long seed)
{
  std::mt19937_64 rng(seed);
  Eigen::VectorXcd const x = random_vector(A.cols, rng);
  Eigen::VectorXcd const z = random_vector(A.rows, rng);
  std::complex<double> const lhs = A.apply(x).dot(z);
  std::complex<double> const rhs = x.dot(A.adjoint(z));
  return std::abs(lhs - rhs) / (x.norm() * z.norm());
}

} // namespace cohere
