#include "surfpde/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "surfpde/error.hpp"

namespace surfpde {

using Eigen::VectorXd;

namespace {

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive and finite");
}

void check_finite(const VectorXd& u, std::size_t step) {
  if (!u.allFinite()) throw NumericalError("state became non-finite at step " + std::to_string(step));
}

void record(IntegrationStats* stats, const LinearSolver& solver) {
  if (!stats) return;
  ++stats->solves;
  stats->max_relative_residual = std::max(stats->max_relative_residual, solver.last_stats().relative_residual);
  stats->max_iterations = std::max(stats->max_iterations, solver.last_stats().iterations);
}

}  // namespace

VectorXd rk4_advance(const RhsFn& rhs, VectorXd u, double t0, double dt, std::size_t steps) {
  check_dt(dt);
  const auto n = u.size();
  VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + static_cast<double>(s) * dt;
    rhs(t, u, k1);
    tmp = u + 0.5 * dt * k1;
    rhs(t + 0.5 * dt, tmp, k2);
    tmp = u + 0.5 * dt * k2;
    rhs(t + 0.5 * dt, tmp, k3);
    tmp = u + dt * k3;
    rhs(t + dt, tmp, k4);
    u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_finite(u, s + 1);
  }
  return u;
}

VectorXd rk4_advance(const SparseMatrixR& A, VectorXd u0, double dt, std::size_t steps) {
  if (A.rows() != A.cols() || A.cols() != u0.size()) throw InputError("rk4_advance: dimension mismatch");
  return rk4_advance([&](double, const VectorXd& u, VectorXd& out) { out.noalias() = A * u; }, std::move(u0), 0.0,
                     dt, steps);
}

SparseMatrixR identity_minus(const SparseMatrixR& A, double c) {
  SparseMatrixR I(A.rows(), A.cols());
  I.setIdentity();
  SparseMatrixR M = I - c * A;
  M.makeCompressed();
  return M;
}

VectorXd imex_euler_advance(const SparseMatrixR& A, const RhsFn& g, VectorXd u, double t0, double dt,
                            std::size_t steps, SolveMethod method, IntegrationStats* stats) {
  return sbdf_advance(A, g, std::move(u), t0, dt, steps, 1, method, stats);
}

VectorXd sbdf_advance(const SparseMatrixR& A, const RhsFn& f, VectorXd u, double t0, double dt, std::size_t steps,
                      int order, SolveMethod method, IntegrationStats* stats) {
  check_dt(dt);
  if (order != 1 && order != 2) throw InputError("sbdf_advance: order must be 1 or 2");
  if (A.rows() != A.cols() || A.cols() != u.size()) throw InputError("sbdf_advance: dimension mismatch");
  if (steps == 0) return u;
  const auto n = u.size();
  VectorXd fn(n), fprev(n), rhs(n);

  LinearSolver first(identity_minus(A, dt), method);
  f(t0, u, fn);
  rhs = u + dt * fn;
  VectorXd uprev = u;
  u = first.solve(rhs, &uprev);
  record(stats, first);
  check_finite(u, 1);
  if (order == 1) {
    for (std::size_t s = 1; s < steps; ++s) {
      f(t0 + static_cast<double>(s) * dt, u, fn);
      rhs = u + dt * fn;
      u = first.solve(rhs, &u);
      record(stats, first);
      check_finite(u, s + 1);
    }
    return u;
  }

  // (3I - 2 dt A) u^{n+1} = 4u^n - u^{n-1} + 2dt (2 f^n - f^{n-1})
  LinearSolver second(identity_minus(A, 2.0 * dt / 3.0), method);
  fprev = fn;
  for (std::size_t s = 1; s < steps; ++s) {
    f(t0 + static_cast<double>(s) * dt, u, fn);
    rhs = (4.0 * u - uprev + 2.0 * dt * (2.0 * fn - fprev)) / 3.0;
    uprev = u;
    u = second.solve(rhs, &uprev);
    record(stats, second);
    check_finite(u, s + 1);
    fprev = fn;
  }
  return u;
}

BlockState imex_block_advance(const SparseMatrixR& A11, const SparseMatrixR& A12, const SparseMatrixR& A21,
                              const SparseMatrixR& A22, const BlockRhsFn& g1, const BlockRhsFn& g2, BlockState s,
                              double t0, double dt, std::size_t steps, SolveMethod method, IntegrationStats* stats) {
  check_dt(dt);
  const auto n = s.u.size();
  for (const SparseMatrixR* B : {&A11, &A12, &A21, &A22})
    if (B->rows() != n || B->cols() != n) throw InputError("imex_block_advance: block dimension mismatch");
  if (s.w.size() != n) throw InputError("imex_block_advance: state dimension mismatch");

  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(static_cast<std::size_t>(A11.nonZeros() + A12.nonZeros() + A21.nonZeros() + A22.nonZeros() + 2 * n));
  auto add = [&](const SparseMatrixR& B, Eigen::Index r0, Eigen::Index c0) {
    for (int i = 0; i < B.outerSize(); ++i)
      for (SparseMatrixR::InnerIterator it(B, i); it; ++it)
        trip.emplace_back(static_cast<int>(r0 + i), static_cast<int>(c0 + it.col()), -dt * it.value());
  };
  add(A11, 0, 0);
  add(A12, 0, n);
  add(A21, n, 0);
  add(A22, n, n);
  for (Eigen::Index i = 0; i < 2 * n; ++i) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  SparseMatrixR M(2 * n, 2 * n);
  M.setFromTriplets(trip.begin(), trip.end());
  LinearSolver solver(M, method);

  VectorXd o1(n), o2(n), rhs(2 * n), x(2 * n);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    g1(t, s.u, s.w, o1);
    g2(t, s.u, s.w, o2);
    rhs.head(n) = s.u + dt * o1;
    rhs.tail(n) = s.w + dt * o2;
    x.head(n) = s.u;
    x.tail(n) = s.w;
    x = solver.solve(rhs, &x);
    record(stats, solver);
    s.u = x.head(n);
    s.w = x.tail(n);
    check_finite(x, k + 1);
  }
  return s;
}

double rk4_amplification(std::complex<double> z) {
  return std::abs(1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))));
}

StabilityReport rk4_stability_check(std::span<const std::complex<double>> eigenvalues, double dt) {
  StabilityReport rep;
  for (const auto& lam : eigenvalues) {
    const double a = rk4_amplification(dt * lam);
    if (a > rep.worst_amplification) {
      rep.worst_amplification = a;
      rep.worst = lam;
    }
  }
  rep.stable = rep.worst_amplification <= 1.0 + 1e-12;
  return rep;
}

}  // namespace surfpde
