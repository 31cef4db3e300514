#include "surfpde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "surfpde/error.hpp"

namespace surfpde {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double rel_error(const VectorXd& u_num, const VectorXd& u_exact, ErrorNorm norm) {
  if (u_num.size() != u_exact.size()) throw InputError("rel_error: length mismatch");
  const VectorXd diff = u_num - u_exact;
  const double den = norm == ErrorNorm::l2 ? u_exact.norm() : u_exact.lpNorm<Eigen::Infinity>();
  if (den == 0.0) throw InputError("rel_error: exact solution has zero norm");
  const double num = norm == ErrorNorm::l2 ? diff.norm() : diff.lpNorm<Eigen::Infinity>();
  return num / den;
}

std::vector<double> eoc(std::span<const double> errors, std::span<const double> hs) {
  if (errors.size() != hs.size()) throw InputError("eoc: errors and spacings differ in length");
  if (errors.size() < 2) throw InputError("eoc: at least two resolutions required");
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) throw InputError("eoc: error entry " + std::to_string(i) + " is not positive");
    if (!(hs[i] > 0.0)) throw InputError("eoc: spacing entry " + std::to_string(i) + " is not positive");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (hs[i] == hs[i + 1]) throw InputError("eoc: repeated spacing");
    out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
  }
  return out;
}

namespace {

SpectrumReport dense_spectrum(const SparseMatrixR& A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (n > 6000) throw InputError("spectrum: dense mode is limited to N <= 6000; use extremal mode");
  MatrixXd M = MatrixXd(A);
  std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, M.data(), n, wr.data(), wi.data(), nullptr,
                                        1, nullptr, 1);
  if (info != 0) throw NumericalError("spectrum: dgeev failed with info " + std::to_string(info));
  SpectrumReport rep;
  rep.method = "dense_full";
  rep.eigenvalues.reserve(static_cast<std::size_t>(n));
  for (lapack_int i = 0; i < n; ++i)
    rep.eigenvalues.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
  return rep;
}

SpectrumReport extremal_spectrum(const SparseMatrixR& A, const ExtremalOptions& opt) {
  const Eigen::Index n = A.rows();
  if (opt.count < 1) throw InputError("spectrum: count must be >= 1");
  const int p = static_cast<int>(std::min<Eigen::Index>(std::max(opt.krylov_dim, 2 * opt.count + 2), n));
  SparseMatrixR I(n, n);
  I.setIdentity();
  const SparseMatrixR shifted = A - opt.shift * I;
  LinearSolver op(shifted, SolveMethod::automatic, 1e-13);

  VectorXd v0(n);
  for (Eigen::Index i = 0; i < n; ++i) v0[i] = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3);

  MatrixXd V(n, p + 1);
  MatrixXd H = MatrixXd::Zero(p + 1, p);
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    H.setZero();
    V.col(0) = v0 / v0.norm();
    int m = p;
    double beta = 0.0;
    for (int j = 0; j < p; ++j) {
      VectorXd w = op.solve(V.col(j));
      for (int pass = 0; pass < 2; ++pass) {
        const VectorXd c = V.leftCols(j + 1).transpose() * w;
        w -= V.leftCols(j + 1) * c;
        H.col(j).head(j + 1) += c;
      }
      beta = w.norm();
      H(j + 1, j) = beta;
      if (beta <= 1e-14 * H.col(j).head(j + 1).norm()) {
        m = j + 1;
        beta = 0.0;
        break;
      }
      V.col(j + 1) = w / beta;
    }

    Eigen::EigenSolver<MatrixXd> es(H.topLeftCorner(m, m));
    if (es.info() != Eigen::Success) throw NumericalError("spectrum: Hessenberg eigensolve failed");
    const Eigen::VectorXcd mu = es.eigenvalues();
    const Eigen::MatrixXcd Y = es.eigenvectors();
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(mu[a]) > std::abs(mu[b]); });
    const int want = std::min(opt.count, m);

    bool converged = true;
    for (int k = 0; k < want; ++k) {
      const int j = order[static_cast<std::size_t>(k)];
      if (beta * std::abs(Y(m - 1, j)) > opt.tol * std::abs(mu[j])) converged = false;
    }
    if (converged || m == n) {
      SpectrumReport rep;
      rep.method = "extremal";
      for (int k = 0; k < want; ++k) rep.eigenvalues.push_back(opt.shift + 1.0 / mu[order[static_cast<std::size_t>(k)]]);
      return rep;
    }
    v0.setZero();
    for (int k = 0; k < want; ++k) {
      const Eigen::VectorXcd x = V.leftCols(m) * Y.col(order[static_cast<std::size_t>(k)]);
      v0 += x.real() + x.imag();
    }
    if (v0.norm() == 0.0) v0 = V.col(0);
  }
  throw NumericalError("spectrum: Arnoldi did not converge in " + std::to_string(opt.max_restarts) + " restarts");
}

}  // namespace

SpectrumReport spectrum(const SparseMatrixR& matrix, SpectrumMode mode, const ExtremalOptions& options) {
  if (matrix.rows() != matrix.cols()) throw InputError("spectrum: matrix must be square");
  if (matrix.rows() == 0) throw InputError("spectrum: empty matrix");
  SpectrumReport rep = mode == SpectrumMode::dense_full ? dense_spectrum(matrix) : extremal_spectrum(matrix, options);
  rep.max_real = -std::numeric_limits<double>::infinity();
  for (const auto& z : rep.eigenvalues) rep.max_real = std::max(rep.max_real, z.real());
  return rep;
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumReport& report) {
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw InputError("cannot write " + path.string());
  std::fprintf(fp, "re,im\n");
  for (const auto& z : report.eigenvalues) std::fprintf(fp, "%.17g,%.17g\n", z.real(), z.imag());
  std::fclose(fp);
}

}  // namespace surfpde
