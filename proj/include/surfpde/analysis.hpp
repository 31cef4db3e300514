#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "surfpde/linear_solve.hpp"

namespace surfpde {

enum class ErrorNorm { l2, linf };

/// ||u_num - u_exact|| / ||u_exact||. Throws InputError on a zero denominator.
double rel_error(const Eigen::VectorXd& u_num, const Eigen::VectorXd& u_exact, ErrorNorm norm);

/// log(e_i/e_{i+1}) / log(h_i/h_{i+1}); one entry fewer than the inputs.
std::vector<double> eoc(std::span<const double> errors, std::span<const double> hs);

enum class SpectrumMode { dense_full, extremal };

struct ExtremalOptions {
  int count = 6;            // eigenvalues reported
  double shift = 1.0;       // shift-invert target
  int krylov_dim = 40;
  int max_restarts = 100;
  double tol = 1e-10;
};

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  double max_real = 0;
  std::string method;
};

/// dense_full: all eigenvalues (LAPACK dgeev), N <= 6000.
/// extremal: eigenvalues nearest `shift` by shift-invert Arnoldi.
SpectrumReport spectrum(const SparseMatrixR& matrix, SpectrumMode mode, const ExtremalOptions& options = {});

/// `re,im` per row.
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumReport& report);

}  // namespace surfpde
