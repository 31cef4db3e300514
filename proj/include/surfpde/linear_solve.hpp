#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/Sparse>

namespace surfpde {

using SparseMatrixR = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

enum class SolveMethod {
  automatic,      // direct up to 20,000 unknowns, iterative above
  direct,         // sparse LU
  bicgstab_ilu0,  // BiCGSTAB preconditioned with ILU(0)
};

struct SolveStats {
  int iterations = 0;            // 0 for direct solves
  double relative_residual = 0;  // ||A x - b|| / ||b||
};

/// Incomplete LU with zero fill on the sparsity pattern of A.
class Ilu0 {
public:
  explicit Ilu0(const SparseMatrixR& A);
  /// Solves (L U) x = b in place.
  void apply(Eigen::VectorXd& x) const;

private:
  SparseMatrixR lu_;
  std::vector<int> diag_;
};

/// Factorizes (or preconditions) A once and solves repeatedly.
class LinearSolver {
public:
  LinearSolver(const SparseMatrixR& A, SolveMethod method = SolveMethod::automatic, double tol = 1e-11);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws NumericalError on non-convergence (10 N iterations) or a
  /// singular factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, const Eigen::VectorXd* guess = nullptr);

  SolveMethod method() const { return method_; }
  const SolveStats& last_stats() const { return stats_; }

private:
  struct Direct;
  SparseMatrixR A_;
  SolveMethod method_;
  double tol_;
  std::unique_ptr<Direct> direct_;
  std::unique_ptr<Ilu0> ilu_;
  SolveStats stats_;
};

Eigen::VectorXd linear_solve(const SparseMatrixR& A, const Eigen::VectorXd& b,
                             SolveMethod method = SolveMethod::automatic, double tol = 1e-11,
                             SolveStats* stats = nullptr);

}  // namespace surfpde
