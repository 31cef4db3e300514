#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "surfpde/error.hpp"
#include "surfpde/geometry.hpp"

using namespace surfpde;
using Eigen::Vector3d;

namespace {

Vector3d fd_gradient(const ImplicitSurface& s, const Vector3d& x) {
  const double h = 1e-6;
  Vector3d g;
  for (int a = 0; a < 3; ++a) {
    Vector3d e = Vector3d::Zero();
    e[a] = h;
    g[a] = (s.value(x + e) - s.value(x - e)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("sphere nodes lie on the unit sphere with radial normals") {
  const SurfaceNodeSet s = fibonacci_sphere_nodes(800);
  CHECK(s.size() == 800);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(s.point(i).norm() - 1.0) < 1e-10);
    CHECK((s.normal(i) - s.point(i)).norm() < 1e-10);
  }
  // Fibonacci spacing: roughly sqrt(4 pi / N) up to a lattice constant.
  CHECK(s.h() > 0.5 * std::sqrt(4 * std::numbers::pi / 800));
  CHECK(s.h() < 1.5 * std::sqrt(4 * std::numbers::pi / 800));
}

TEST_CASE("implicit surface normals match finite differences of F") {
  for (const auto& surf : {surfaces::tooth(), surfaces::torus(1.0, 1.0 / 3.0), surfaces::dziuk()}) {
    const SurfaceNodeSet s = implicit_surface_nodes(surf, 0.15);
    REQUIRE(s.size() > 50);
    for (std::size_t i = 0; i < s.size(); i += 17) {
      CHECK(std::abs(surf.value(s.point(i))) < 1e-10);
      const Vector3d g = fd_gradient(surf, s.point(i)).normalized();
      CHECK((g - s.normal(i)).norm() < 1e-6);
    }
  }
}

TEST_CASE("tooth node count scales like h^-2") {
  const auto a = implicit_surface_nodes(surfaces::tooth(), 0.2).size();
  const auto b = implicit_surface_nodes(surfaces::tooth(), 0.1).size();
  const double ratio = static_cast<double>(b) / static_cast<double>(a);
  CHECK(ratio > 4.0 / 1.5);
  CHECK(ratio < 4.0 * 1.5);
}

TEST_CASE("sphere mean curvature is 2 for outward normals") {
  const ImplicitSurface s = surfaces::unit_sphere();
  CHECK(s.mean_curvature(Vector3d(0.6, 0.0, 0.8)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("surface Laplacian of xy on the unit sphere is -6xy") {
  const ImplicitSurface s = surfaces::unit_sphere();
  const Vector3d x = Vector3d(0.3, -0.5, 0.2).normalized();
  const Vector3d g(x.y(), x.x(), 0);
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  H(0, 1) = H(1, 0) = 1;
  CHECK(surface_laplacian(s, x, g, H) == doctest::Approx(-6 * x.x() * x.y()).epsilon(1e-12));
}

TEST_CASE("rose curve") {
  const double r0 = 5, h = 0.05;
  const int k = 25;
  const SurfaceNodeSet s = rose_curve_nodes(r0, k, h);
  CHECK(s.dim() == 2);
  CHECK((s.point(0) - Vector3d(6, 0, 0)).norm() < 1e-12);

  // Arclength by independent quadrature of the speed.
  auto speed = [&](double t) {
    const double r = r0 + std::cos(k * t), dr = -k * std::sin(k * t);
    return std::sqrt(r * r + dr * dr);
  };
  const double length =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(speed, 0.0, 2 * std::numbers::pi, 20, 1e-12);
  CHECK(rose_curve_length(r0, k) == doctest::Approx(length).epsilon(1e-9));
  CHECK(std::abs(static_cast<double>(s.size()) - length / h) <= 0.05 * length / h);

  // Consecutive arclength gaps, each measured by quadrature between the
  // parameter values of adjacent nodes.
  auto param = [](const Vector3d& p) {
    double t = std::atan2(p.y(), p.x());
    return t < 0 ? t + 2 * std::numbers::pi : t;
  };
  double worst = 0;
  for (std::size_t i = 0; i + 1 < s.size(); i += 37) {
    const double gap = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        speed, param(s.point(i)), param(s.point(i + 1)), 10, 1e-12);
    worst = std::max(worst, std::abs(gap / h - 1.0));
  }
  const double spacing = length / static_cast<double>(s.size());
  CHECK(worst < 0.01 + std::abs(spacing / h - 1.0));
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s.normal(i).norm() - 1.0) < 1e-12);
  // Outward: normals point away from the origin on average.
  double dot = 0;
  for (std::size_t i = 0; i < s.size(); ++i) dot += s.normal(i).dot(s.point(i));
  CHECK(dot > 0);
}

TEST_CASE("rose curve rejects r0 <= 1") { CHECK_THROWS_AS(rose_curve_nodes(1.0, 5, 0.1), InputError); }

TEST_CASE("bumpy sphere") {
  const SurfaceNodeSet flat = bumpy_sphere_nodes(0.0, 21, 500);
  const SurfaceNodeSet fib = fibonacci_sphere_nodes(500);
  for (std::size_t i = 0; i < 500; ++i) CHECK((flat.point(i) - fib.point(i)).norm() < 1e-14);

  const SurfaceNodeSet b = bumpy_sphere_nodes(0.1, 21, 2000);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(std::abs(b.normal(i).norm() - 1.0) < 1e-12);
    const double phi = std::acos(std::clamp(b.point(i).z() / b.point(i).norm(), -1.0, 1.0));
    CHECK(b.point(i).norm() == doctest::Approx(1 + 0.1 * std::sin(21 * phi)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(bumpy_sphere_nodes(1.5, 21, 100), InputError);
}

TEST_CASE("node set validation") {
  std::vector<Vector3d> p = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}};
  std::vector<Vector3d> n = p;
  CHECK_NOTHROW(SurfaceNodeSet(3, p, n));
  n[0] = {2, 0, 0};
  CHECK_THROWS_AS(SurfaceNodeSet(3, p, n), InputError);
  n[0] = p[0];
  p[1] = p[0];
  CHECK_THROWS_AS(SurfaceNodeSet(3, p, n), InputError);
}

TEST_CASE("PCA normals on a sphere cloud are radial and outward") {
  const SurfaceNodeSet s = fibonacci_sphere_nodes(1000);
  const auto n = estimate_normals(s.points(), 12);
  double worst = 0;
  for (std::size_t i = 0; i < n.size(); ++i) worst = std::max(worst, (n[i] - s.point(i)).norm());
  CHECK(worst < 0.05);
}

TEST_CASE("collinear neighbourhoods are rejected") {
  std::vector<Vector3d> line;
  for (int i = 0; i < 20; ++i) line.emplace_back(0.1 * i, 0, 0);
  CHECK_THROWS_AS(estimate_normals(line, 8), InputError);
}

TEST_CASE("point cloud round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "surfpde_geometry_test";
  std::filesystem::create_directories(dir);
  const SurfaceNodeSet s = fibonacci_sphere_nodes(300);

  write_xyz_csv(dir / "a.csv", s);
  const SurfaceNodeSet a = load_point_cloud(dir / "a.csv", PointCloudFormat::xyz_csv);
  REQUIRE(a.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK((a.point(i) - s.point(i)).norm() < 1e-12);

  write_ply(dir / "a.ply", s);
  const SurfaceNodeSet b = load_point_cloud(dir / "a.ply", PointCloudFormat::ply);
  REQUIRE(b.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK((b.normal(i) - s.normal(i)).norm() < 1e-10);

  std::ofstream(dir / "bad.csv") << "x,y,z\n1,2\n";
  CHECK_THROWS_AS(load_point_cloud(dir / "bad.csv", PointCloudFormat::xyz_csv), InputError);
  std::filesystem::remove_all(dir);
}
