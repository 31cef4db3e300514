#include <doctest.h>

#include <cmath>
#include <numbers>

#include "surfpde/error.hpp"
#include "surfpde/geometry.hpp"
#include "surfpde/rbf_weights.hpp"
#include "surfpde/stencil.hpp"

using namespace surfpde;
using Eigen::Vector3d;
using Eigen::VectorXd;

TEST_CASE("binomial and basis size") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(9, 3) == 84);
  CHECK(monomial_exponents(2, 3).size() == 10);
  CHECK(monomial_exponents(3, 2).size() == 10);
  const auto e = monomial_exponents(2, 3);
  CHECK(e[0] == std::array<int, 3>{0, 0, 0});
  CHECK(e[1] == std::array<int, 3>{1, 0, 0});
  CHECK(e[4] == std::array<int, 3>{2, 0, 0});
  CHECK(e[5] == std::array<int, 3>{1, 1, 0});
}

TEST_CASE("config validation") {
  PhsPolyConfig c = PhsPolyConfig::with_defaults(2);
  CHECK(c.violation().empty());
  CHECK(c.n_s == 20);
  CHECK(c.n_perp == 4);
  CHECK(PhsPolyConfig::with_defaults(3).n_perp == 4);
  CHECK(admissible_n_perp(4, 3));
  CHECK_FALSE(admissible_n_perp(4, 4));
  CHECK_FALSE(admissible_n_perp(5, 2));
  c.m = 4;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = PhsPolyConfig::with_defaults(2);
  c.m = 7;  // (m-1)/2 = 3 > l
  CHECK_THROWS_AS(c.validate(), InputError);
  c = PhsPolyConfig::with_defaults(2);
  c.eps_normal = 1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = PhsPolyConfig::with_defaults(4);
  c.n_s = 20;  // 35 basis functions > 20 + 6
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("PHS closed forms against finite differences") {
  const Vector3d c(0.2, 0.1, -0.3), x(-0.4, 0.5, 0.6);
  for (int m : {3, 5, 7, 9}) {
    auto phi = [&](const Vector3d& p) { return std::pow((p - c).norm(), m); };
    const double h = 1e-4;
    double lap = 0;
    for (int a = 0; a < 3; ++a) {
      Vector3d e = Vector3d::Zero();
      e[a] = h;
      const double fd = (phi(x + e) - phi(x - e)) / (2 * h);
      CHECK(phs_operator_eval(LinearOperatorSpec::gradient_component(a), m, x, c, 3) ==
            doctest::Approx(fd).epsilon(1e-6));
      lap += (phi(x + e) - 2 * phi(x) + phi(x - e)) / (h * h);
    }
    CHECK(phs_operator_eval(LinearOperatorSpec::laplacian(), m, x, c, 3) == doctest::Approx(lap).epsilon(1e-6));
    // Laplacian of r^m in 3-D is m (m+1) r^(m-2).
    const double r = (x - c).norm();
    CHECK(phs_operator_eval(LinearOperatorSpec::laplacian(), m, x, c, 3) ==
          doctest::Approx(m * (m + 1) * std::pow(r, m - 2)).epsilon(1e-12));
    if (m >= 5)
      CHECK(phs_operator_eval(LinearOperatorSpec::laplacian_power(2), m, x, c, 3) ==
            doctest::Approx(m * (m + 1) * (m - 2) * (m - 1) * std::pow(r, m - 4)).epsilon(1e-12));
  }
  // 2-D: Laplacian of r^m is m^2 r^(m-2).
  const Vector3d x2(0.3, 0.4, 0), c2(0, 0, 0);
  CHECK(phs_operator_eval(LinearOperatorSpec::laplacian(), 3, x2, c2, 2) == doctest::Approx(9 * 0.5).epsilon(1e-12));
}

TEST_CASE("weights reproduce polynomials and are cardinal for the identity") {
  const SurfaceNodeSet s = torus_nodes(1200, 1.0, 1.0 / 3.0);
  for (int l : {2, 3, 5}) {
    const PhsPolyConfig c = PhsPolyConfig::with_defaults(l);
    const Stencil st = build_stencil(s, 100, c);
    const auto pts = stencil_points(s, st);
    const auto op = LinearOperatorSpec::laplacian();
    const FullStencilWeights w = full_stencil_weights(s, st, c, op);
    VectorXd all(w.w_s.size() + w.w_perp.size());
    all << w.w_s, w.w_perp;
    const VectorXd exact = poly_operator_eval(op, l, 3, Vector3d::Zero());
    VectorXd got = VectorXd::Zero(exact.size()), mag = VectorXd::Zero(exact.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const VectorXd p = poly_basis(l, 3, pts[j] - st.center);
      got += all[static_cast<Eigen::Index>(j)] * p;
      mag += std::abs(all[static_cast<Eigen::Index>(j)]) * p.cwiseAbs();
    }
    for (Eigen::Index k = 0; k < exact.size(); ++k)
      CHECK(std::abs(got[k] - exact[k]) <= 1e-8 * std::max(mag[k], std::abs(exact[k])));

    const FullStencilWeights id = full_stencil_weights(s, st, c, LinearOperatorSpec::identity());
    CHECK(std::abs(id.w_s[0] - 1.0) < 1e-10);
    CHECK(id.w_s.tail(id.w_s.size() - 1).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(id.w_perp.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("collapse keeps the weight sum") {
  VectorXd ws(3), wp(2);
  ws << 1, 2, 3;
  wp << -0.5, 4;
  const VectorXd c = collapse_weights(ws, wp);
  CHECK(c[0] == doctest::Approx(4.5));
  CHECK(c[1] == 2);
  CHECK(c.sum() == doctest::Approx(ws.sum() + wp.sum()));
}

TEST_CASE("surface Laplacian of a degree-2 harmonic is exact on the sphere") {
  const SurfaceNodeSet s = fibonacci_sphere_nodes(1500);
  for (int l : {2, 3, 4, 6}) {
    PhsPolyConfig c = PhsPolyConfig::with_defaults(l);
    c.n_perp = 10;
    const CollapsedWeights w = surface_operator_weights(s, 321, c, LinearOperatorSpec::laplacian());
    double got = 0;
    for (std::size_t j = 0; j < w.indices.size(); ++j) {
      const Vector3d& p = s.point(w.indices[j]);
      got += w.values[j] * p.x() * p.y();
    }
    const Vector3d& x = s.point(321);
    CHECK(got == doctest::Approx(-6 * x.x() * x.y()).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("circle without normal points is rank deficient") {
  const int n = 200;
  std::vector<Vector3d> p;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * std::numbers::pi * i / n;
    p.emplace_back(std::cos(t), std::sin(t), 0);
  }
  const SurfaceNodeSet s(2, p, p);
  PhsPolyConfig c;
  c.dim = 2;
  c.l = 2;
  c.m = 3;
  c.n_s = 9;
  c.n_perp = 4;
  c.eps_normal = 0.1;
  Stencil st = build_stencil(s, 0, c);
  st.offsurface_points.clear();
  const auto pts = stencil_points(s, st);
  CHECK_THROWS_AS(full_stencil_weights_at(pts, pts.size(), st.center, st.center, c, LinearOperatorSpec::laplacian()),
                  NumericalError);
  // With the normal extension the same stencil is fine.
  const Stencil ok = build_stencil(s, 0, c);
  CHECK_NOTHROW(full_stencil_weights(s, ok, c, LinearOperatorSpec::laplacian()));
}

TEST_CASE("condition estimate grows as eps shrinks") {
  const SurfaceNodeSet s = fibonacci_sphere_nodes(1000);
  PhsPolyConfig c = PhsPolyConfig::with_defaults(2);
  c.eps_normal = 0.5;
  const double k1 = full_stencil_weights(s, build_stencil(s, 5, c), c, LinearOperatorSpec::laplacian(), true).cond_A;
  c.eps_normal = 0.01;
  const double k2 = full_stencil_weights(s, build_stencil(s, 5, c), c, LinearOperatorSpec::laplacian(), true).cond_A;
  CHECK(k1 > 1);
  CHECK(k2 > k1);
}
