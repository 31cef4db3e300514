#include "surfpde/linear_solve.hpp"

#include <cmath>

#include <Eigen/SparseLU>

#include "surfpde/error.hpp"

namespace surfpde {

using Eigen::VectorXd;

Ilu0::Ilu0(const SparseMatrixR& A) : lu_(A), diag_(static_cast<std::size_t>(A.rows()), -1) {
  if (A.rows() != A.cols()) throw InputError("Ilu0: matrix must be square");
  lu_.makeCompressed();
  const int n = static_cast<int>(lu_.rows());
  const int* outer = lu_.outerIndexPtr();
  const int* inner = lu_.innerIndexPtr();
  double* val = lu_.valuePtr();

  for (int i = 0; i < n; ++i)
    for (int p = outer[i]; p < outer[i + 1]; ++p)
      if (inner[p] == i) diag_[static_cast<std::size_t>(i)] = p;

  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (diag_[static_cast<std::size_t>(i)] < 0)
      throw NumericalError("Ilu0: missing diagonal entry in row " + std::to_string(i));
    for (int p = outer[i]; p < outer[i + 1]; ++p) pos[static_cast<std::size_t>(inner[p])] = p;
    for (int p = outer[i]; p < outer[i + 1] && inner[p] < i; ++p) {
      const int k = inner[p];
      const double pivot = val[diag_[static_cast<std::size_t>(k)]];
      if (pivot == 0.0) throw NumericalError("Ilu0: zero pivot in row " + std::to_string(k));
      val[p] /= pivot;
      const double lik = val[p];
      for (int q = diag_[static_cast<std::size_t>(k)] + 1; q < outer[k + 1]; ++q) {
        const int at = pos[static_cast<std::size_t>(inner[q])];
        if (at >= 0) val[at] -= lik * val[q];
      }
    }
    for (int p = outer[i]; p < outer[i + 1]; ++p) pos[static_cast<std::size_t>(inner[p])] = -1;
    if (val[diag_[static_cast<std::size_t>(i)]] == 0.0)
      throw NumericalError("Ilu0: zero pivot in row " + std::to_string(i));
  }
}

void Ilu0::apply(VectorXd& x) const {
  const int n = static_cast<int>(lu_.rows());
  const int* outer = lu_.outerIndexPtr();
  const int* inner = lu_.innerIndexPtr();
  const double* val = lu_.valuePtr();
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int p = outer[i]; p < diag_[static_cast<std::size_t>(i)]; ++p) s -= val[p] * x[inner[p]];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    const int d = diag_[static_cast<std::size_t>(i)];
    double s = x[i];
    for (int p = d + 1; p < outer[i + 1]; ++p) s -= val[p] * x[inner[p]];
    x[i] = s / val[d];
  }
}

struct LinearSolver::Direct {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

LinearSolver::LinearSolver(const SparseMatrixR& A, SolveMethod method, double tol)
    : A_(A), method_(method), tol_(tol) {
  if (A.rows() != A.cols()) throw InputError("linear_solve: matrix must be square");
  if (method_ == SolveMethod::automatic)
    method_ = A.rows() <= 20000 ? SolveMethod::direct : SolveMethod::bicgstab_ilu0;
  if (method_ == SolveMethod::direct) {
    direct_ = std::make_unique<Direct>();
    Eigen::SparseMatrix<double> colmajor = A_;
    colmajor.makeCompressed();
    direct_->lu.compute(colmajor);
    if (direct_->lu.info() != Eigen::Success)
      throw NumericalError("linear_solve: sparse LU failed (" + direct_->lu.lastErrorMessage() + ")");
  } else {
    ilu_ = std::make_unique<Ilu0>(A_);
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

VectorXd LinearSolver::solve(const VectorXd& b, const VectorXd* guess) {
  if (b.size() != A_.rows()) throw InputError("linear_solve: right-hand side has wrong length");
  const double bnorm = b.norm();
  stats_ = {};
  if (bnorm == 0.0) return VectorXd::Zero(b.size());

  if (method_ == SolveMethod::direct) {
    VectorXd x = direct_->lu.solve(b);
    if (direct_->lu.info() != Eigen::Success || !x.allFinite())
      throw NumericalError("linear_solve: direct solve failed");
    stats_.relative_residual = (A_ * x - b).norm() / bnorm;
    if (stats_.relative_residual > 1e-8) throw NumericalError("linear_solve: matrix is numerically singular");
    return x;
  }

  // Right-preconditioned BiCGSTAB; restarts on breakdown or when the
  // recursively updated residual drifts from the true one.
  const auto n = A_.rows();
  const long max_iter = 10 * static_cast<long>(n);
  VectorXd x = guess ? *guess : VectorXd::Zero(n);
  VectorXd r = b - A_ * x;
  long it = 0;
  while (it < max_iter) {
    if (r.norm() <= tol_ * bnorm) break;
    const VectorXd r_hat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    VectorXd v = VectorXd::Zero(n), p = VectorXd::Zero(n), p_hat(n), s(n), s_hat(n), t(n);
    bool restart = false;
    while (it < max_iter) {
      ++it;
      const double rho_new = r_hat.dot(r);
      if (rho_new == 0.0 || omega == 0.0) {
        restart = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      p = r + beta * (p - omega * v);
      p_hat = p;
      ilu_->apply(p_hat);
      v.noalias() = A_ * p_hat;
      const double denom = r_hat.dot(v);
      if (denom == 0.0) {
        restart = true;
        break;
      }
      alpha = rho / denom;
      s = r - alpha * v;
      if (s.norm() <= tol_ * bnorm) {
        x += alpha * p_hat;
        break;
      }
      s_hat = s;
      ilu_->apply(s_hat);
      t.noalias() = A_ * s_hat;
      const double tt = t.squaredNorm();
      omega = tt == 0.0 ? 0.0 : t.dot(s) / tt;
      x += alpha * p_hat + omega * s_hat;
      r = s - omega * t;
      if (r.norm() <= tol_ * bnorm) break;
    }
    if (!x.allFinite()) throw NumericalError("linear_solve: BiCGSTAB produced non-finite iterate");
    r = b - A_ * x;
    if (!restart && r.norm() <= tol_ * bnorm) break;
  }
  stats_.iterations = static_cast<int>(it);
  stats_.relative_residual = r.norm() / bnorm;
  if (stats_.relative_residual > tol_)
    throw NumericalError("linear_solve: BiCGSTAB did not converge in " + std::to_string(max_iter) + " iterations");
  return x;
}

VectorXd linear_solve(const SparseMatrixR& A, const VectorXd& b, SolveMethod method, double tol, SolveStats* stats) {
  LinearSolver solver(A, method, tol);
  VectorXd x = solver.solve(b);
  if (stats) *stats = solver.last_stats();
  return x;
}

}  // namespace surfpde
