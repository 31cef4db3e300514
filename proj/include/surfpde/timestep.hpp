#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Core>

#include "surfpde/linear_solve.hpp"

namespace surfpde {

/// out = f(t, u). out arrives sized like u.
using RhsFn = std::function<void(double t, const Eigen::VectorXd& u, Eigen::VectorXd& out)>;

struct IntegrationStats {
  std::size_t solves = 0;
  double max_relative_residual = 0;
  int max_iterations = 0;
};

/// Classical RK4. Throws NumericalError naming the step at which the state
/// became non-finite.
Eigen::VectorXd rk4_advance(const RhsFn& rhs, Eigen::VectorXd u0, double t0, double dt, std::size_t steps);
Eigen::VectorXd rk4_advance(const SparseMatrixR& A, Eigen::VectorXd u0, double dt, std::size_t steps);

/// u_t = A u + f(t, u). Order 1 is IMEX Euler; order 2 takes one SBDF1 step
/// and then SBDF2. The two system matrices are factorized once.
Eigen::VectorXd sbdf_advance(const SparseMatrixR& A, const RhsFn& f, Eigen::VectorXd u0, double t0, double dt,
                             std::size_t steps, int order, SolveMethod method = SolveMethod::automatic,
                             IntegrationStats* stats = nullptr);

/// (I - dt A) u^{n+1} = u^n + dt g(t_n, u^n).
Eigen::VectorXd imex_euler_advance(const SparseMatrixR& A, const RhsFn& g, Eigen::VectorXd u0, double t0, double dt,
                                   std::size_t steps, SolveMethod method = SolveMethod::automatic,
                                   IntegrationStats* stats = nullptr);

struct BlockState {
  Eigen::VectorXd u, w;
};

/// Monolithic first-order IMEX step for
///   u_t = A11 u + A12 w + g1,  w_t = A21 u + A22 w + g2.
/// g1, g2 receive (t, u, w, out).
using BlockRhsFn =
    std::function<void(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& w, Eigen::VectorXd& out)>;

BlockState imex_block_advance(const SparseMatrixR& A11, const SparseMatrixR& A12, const SparseMatrixR& A21,
                              const SparseMatrixR& A22, const BlockRhsFn& g1, const BlockRhsFn& g2, BlockState s0,
                              double t0, double dt, std::size_t steps, SolveMethod method = SolveMethod::automatic,
                              IntegrationStats* stats = nullptr);

/// I - c A as a sparse matrix.
SparseMatrixR identity_minus(const SparseMatrixR& A, double c);

struct StabilityReport {
  bool stable = true;
  std::complex<double> worst{0.0, 0.0};  // eigenvalue with the largest |R(dt lambda)|
  double worst_amplification = 0;
};

/// |R(z)| <= 1 for every z = dt lambda, R the RK4 stability polynomial.
StabilityReport rk4_stability_check(std::span<const std::complex<double>> eigenvalues, double dt);

double rk4_amplification(std::complex<double> z);

}  // namespace surfpde
