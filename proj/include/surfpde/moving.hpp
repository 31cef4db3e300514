#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "surfpde/geometry.hpp"
#include "surfpde/phs_config.hpp"
#include "surfpde/problems.hpp"

namespace surfpde {

/// Mean curvature of a sphere of radius r with outward normals.
double curvature_of_sphere(double r);

/// Radius of the expanding sphere, 1 + 0.5 t.
double expanding_sphere_radius(double t);

/// Node count for a sphere of radius r sampled at resampling spacing dx:
/// round(2.24 * 4 pi r^2 / dx^2).
std::size_t resample_count(double r, double dx);

struct MovingState {
  SurfaceNodeSet nodes;
  Eigen::VectorXd u;
  double t = 0;
  double radius = 1;
  Eigen::VectorXd curvature;  // per node
};

/// Fibonacci sphere of the given radius and node count.
SurfaceNodeSet scaled_sphere_nodes(std::size_t n, double radius);

/// Initial state on the unit sphere at resampling spacing dx.
MovingState initial_moving_state(double dx, const std::function<double(const Eigen::Vector3d&)>& u0);

/// Moves the sphere by v = 0.5 n for dt, resamples at spacing dx and carries
/// u over: old nodes are pushed radially to the new sphere, then the
/// identity-operator interpolant is evaluated at the new nodes.
MovingState move_and_resample(const MovingState& state, double dt, double dx, const PhsPolyConfig& config);

struct ExpandingSphereOptions {
  double dx = 0.2;
  int l = 4;
  int m = 5;
  std::optional<std::size_t> n_s;  // default floor(1.5 C(l+3, 3))
  std::size_t n_perp = 14;
  double eps_normal = 0.2;
  double t_final = 0.5;
  double dt_factor = 0.4;  // dt = dt_factor dx^2, rounded so steps divide t_final
};

struct TimeSample {
  double t;
  std::size_t n;
  double error;
};

/// Du/Dt + u div v - Delta u = f on the sphere expanding with v = 0.5 n,
/// exact u = e^{-6t} x y. IMEX Euler per step, then move_and_resample.
/// Relative l_inf error at t_final. Stats: n0, n_final, radius.
ProblemRun expanding_sphere_conservation(const ExpandingSphereOptions& options,
                                         std::vector<TimeSample>* history = nullptr);

/// t,n,error
void write_time_series_csv(const std::filesystem::path& path, const std::vector<TimeSample>& samples);

}  // namespace surfpde
