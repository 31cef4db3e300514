#include <doctest.h>

#include <cmath>
#include <numbers>

#include "surfpde/error.hpp"
#include "surfpde/moving.hpp"

using namespace surfpde;
using Eigen::Vector3d;
using Eigen::VectorXd;

TEST_CASE("sphere curvature and radius") {
  CHECK(curvature_of_sphere(1.0) == 2.0);
  CHECK(curvature_of_sphere(1.25) == doctest::Approx(1.6));
  CHECK_THROWS_AS(curvature_of_sphere(0.0), InputError);
  CHECK(expanding_sphere_radius(0.5) == doctest::Approx(1.25));
}

TEST_CASE("resample count follows the area") {
  CHECK(resample_count(1.0, 0.2) == static_cast<std::size_t>(std::lround(2.24 * 4 * std::numbers::pi / 0.04)));
  const double ratio = static_cast<double>(resample_count(2.0, 0.1)) / static_cast<double>(resample_count(1.0, 0.1));
  CHECK(ratio == doctest::Approx(4.0).epsilon(1e-3));
  CHECK_THROWS_AS(resample_count(1.0, 0.0), InputError);
}

TEST_CASE("move and resample carries a quadratic field exactly") {
  PhsPolyConfig c = PhsPolyConfig::with_defaults(2);
  MovingState s = initial_moving_state(0.3, [](const Vector3d& x) { return x.x() * x.y() - 2 * x.z() * x.z(); });
  const double r0 = s.radius;
  const MovingState t = move_and_resample(s, 0.2, 0.3, c);
  CHECK(t.radius == doctest::Approx(r0 + 0.1));
  CHECK(t.t == doctest::Approx(0.2));
  CHECK(t.nodes.size() == resample_count(t.radius, 0.3));
  // Material points keep their values: u_new(y) = u_old(y r0 / r_new).
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const Vector3d y = t.nodes.point(i) * (r0 / t.radius);
    CHECK(t.u[static_cast<Eigen::Index>(i)] == doctest::Approx(y.x() * y.y() - 2 * y.z() * y.z()).epsilon(1e-9).scale(1.0));
    CHECK(t.curvature[static_cast<Eigen::Index>(i)] == doctest::Approx(2.0 / t.radius));
  }
}

TEST_CASE("expanding sphere on a coarse grid") {
  ExpandingSphereOptions o;
  o.dx = 0.5;
  std::vector<TimeSample> hist;
  const ProblemRun r = expanding_sphere_conservation(o, &hist);
  CHECK(r.stat("radius") == doctest::Approx(1.25));
  CHECK(hist.size() == r.steps + 1);
  CHECK(hist.front().error < 1e-12);
  CHECK(std::isfinite(r.error));
  CHECK(r.error < 1.0);
}
