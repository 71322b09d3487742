#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace cohere
{
class FourierOperator;

/// Step sizes obey sigma * tau * ||A||^2 < 1 with ||A|| from power iteration.
/// tau = sigma = 0 selects tau * sigma = (step_fraction / ||A||)^2 with ratio tau / sigma =
/// step_ratio, or 0.1 ||y|| / (||A|| m) when step_ratio is 0.
struct SolverConfig
{
  int max_iterations = 5000;
  double tau = 0.0;
  double sigma = 0.0;
  double step_fraction = 0.95;
  double step_ratio = 0.0;
  bool adaptive = false; // residual balancing of tau/sigma at fixed product
  double tol_feas = 1e-6;       // ||A x - y||_2
  double tol_stagnation = 1e-9; // relative l1 change over `window` iterations
  int window = 10;
  int power_iterations = 100;

  void validate() const;
};

struct LinearOperator
{
  std::function<Eigen::VectorXcd(Eigen::VectorXcd const&)> apply;
  std::function<Eigen::VectorXcd(Eigen::VectorXcd const&)> adjoint;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

LinearOperator make_operator(Eigen::MatrixXcd const& A);
LinearOperator make_operator(FourierOperator const& op);

/// Largest singular value, deterministic start vector.
double operator_norm(LinearOperator const& A, int iterations);

struct SolveResult
{
  Eigen::VectorXcd x;
  int iterations = 0;
  double op_norm = 0.0;
  std::vector<double> residuals;  // ||A x_k - y||_2 per iteration
  std::vector<double> objectives; // ||x_k||_1 per iteration
};

/// min ||x||_1 subject to A x = y by primal-dual splitting from x = 0.
/// Throws NonConvergenceError when max_iterations is reached.
SolveResult basis_pursuit(LinearOperator const& A, Eigen::VectorXcd const& y, SolverConfig const& cfg);

/// Relative adjoint mismatch |<Ax, z> - <x, A*z>| / (||x|| ||z||) for seeded random x, z.
double adjoint_mismatch(LinearOperator const& A, unsigned long long seed);

} // namespace cohere
