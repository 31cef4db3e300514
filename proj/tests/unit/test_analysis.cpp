#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "surfpde/analysis.hpp"
#include "surfpde/error.hpp"
#include "surfpde/geometry.hpp"
#include "surfpde/operators.hpp"

using namespace surfpde;
using Eigen::VectorXd;

namespace {

std::vector<double> sorted_real(const SpectrumReport& r) {
  std::vector<double> v;
  for (const auto& z : r.eigenvalues) v.push_back(z.real());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("relative errors") {
  VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << 1, 2, 4;
  CHECK(rel_error(a, b, ErrorNorm::linf) == doctest::Approx(0.25));
  CHECK(rel_error(a, b, ErrorNorm::l2) == doctest::Approx(1.0 / std::sqrt(21.0)));
  CHECK_THROWS_AS(rel_error(a, VectorXd::Zero(3), ErrorNorm::l2), InputError);
}

TEST_CASE("eoc of exact power laws") {
  const std::vector<double> h = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * std::pow(x, 4));
  for (double p : eoc(e, h)) CHECK(std::abs(p - 4.0) < 1e-12);
  const std::vector<double> e1 = {0.2, 0.1, 0.05, 0.025};
  for (double p : eoc(e1, h)) CHECK(std::abs(p - 1.0) < 1e-12);
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(eoc(one, one), InputError);
  // Errors 0.34, 0.086 at dx 0.4, 0.2 give about 2.
  const std::vector<double> tab = {0.34, 0.086}, th = {0.4, 0.2};
  CHECK(eoc(tab, th)[0] == doctest::Approx(1.983).epsilon(1e-3));
}

TEST_CASE("dense spectrum of a diagonal matrix") {
  SparseMatrixR A(2, 2);
  A.insert(0, 0) = -1;
  A.insert(1, 1) = -2;
  const SpectrumReport r = spectrum(A, SpectrumMode::dense_full);
  CHECK(r.max_real == doctest::Approx(-1));
  const auto v = sorted_real(r);
  CHECK(v[0] == doctest::Approx(-2));
  CHECK(v[1] == doctest::Approx(-1));
}

TEST_CASE("shift-invert Arnoldi finds the eigenvalues closest to the shift") {
  const SurfaceNodeSet s = fibonacci_sphere_nodes(700);
  const OperatorMatrix L = assemble(s, PhsPolyConfig::with_defaults(2), LinearOperatorSpec::laplacian());
  const auto dense = spectrum(L, SpectrumMode::dense_full);
  ExtremalOptions o;
  o.count = 4;
  o.shift = 0.5;
  const auto ext = spectrum(L, SpectrumMode::extremal, o);
  REQUIRE(ext.eigenvalues.size() == 4);
  for (const auto& z : ext.eigenvalues) {
    double best = 1e300;
    for (const auto& w : dense.eigenvalues) best = std::min(best, std::abs(z - w));
    CHECK(best < 1e-6 * std::max(1.0, std::abs(z)));
  }
  // The constant mode near zero is the closest to 0.5.
  CHECK(std::abs(ext.max_real) < 1e-6);
}

TEST_CASE("spectrum is invariant under symmetric reordering") {
  const SurfaceNodeSet s = fibonacci_sphere_nodes(300);
  const OperatorMatrix L = assemble(s, PhsPolyConfig::with_defaults(2), LinearOperatorSpec::laplacian());
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P(300);
  P.setIdentity();
  std::reverse(P.indices().data(), P.indices().data() + 300);
  const SparseMatrixR Q = SparseMatrixR(P * L * P.transpose());
  const auto a = sorted_real(spectrum(L, SpectrumMode::dense_full));
  const auto b = sorted_real(spectrum(Q, SpectrumMode::dense_full));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-8 * std::max(1.0, std::abs(a[i])));
}
