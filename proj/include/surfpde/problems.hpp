#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "surfpde/analysis.hpp"
#include "surfpde/geometry.hpp"
#include "surfpde/operators.hpp"
#include "surfpde/phs_config.hpp"

namespace surfpde {

/// Outcome of one driver run. `error` is the relative error in `norm`
/// against the exact solution (NaN for runs without one).
struct ProblemRun {
  ProblemRun(std::string name, SurfaceNodeSet node_set, PhsPolyConfig cfg)
      : problem(std::move(name)), nodes(std::move(node_set)), config(cfg) {}

  std::string problem;
  SurfaceNodeSet nodes;
  PhsPolyConfig config;
  double dt = 0;
  std::size_t steps = 0;
  double error = 0;
  ErrorNorm norm = ErrorNorm::linf;
  double wall_seconds = 0;
  std::vector<std::pair<std::string, Eigen::VectorXd>> fields;
  std::vector<std::pair<std::string, double>> stats;

  double stat(const std::string& key) const;
};

struct ConvergenceRow {
  std::size_t n = 0;
  double h = 0;
  double error = 0;
  double eoc = 0;  // NaN on the first row
  double wall_seconds = 0;
};

/// e.o.c. between consecutive runs, measured against h.
std::vector<ConvergenceRow> convergence_table(const std::vector<ProblemRun>& runs);

/// n,h,error,eoc. Deterministic for deterministic runs.
void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows);
/// n,wall_seconds
void write_timing_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows);

/// Writes the node set with every field of the run as a vertex property.
void write_run_ply(const std::filesystem::path& path, const ProblemRun& run);

/// Fibonacci sphere whose average spacing is close to h.
SurfaceNodeSet sphere_nodes_for_spacing(double h);

// ---------------------------------------------------------------------------
// Exact data

/// Value, gradient and Hessian of an ambient function.
struct ScalarJet {
  double value;
  Eigen::Vector3d gradient;
  Eigen::Matrix3d hessian;
};
/// -cos(3 pi x / 4) cos(pi y) sin(3 pi z / 2)
ScalarJet poisson_u1(const Eigen::Vector3d& x);
/// -xy
ScalarJet poisson_u2(const Eigen::Vector3d& x);

/// Truncated spherical-harmonic series (degrees 1..30) at a unit vector.
double heat_sphere_exact(const Eigen::Vector3d& x, double t);

/// (1/8) x (x^4 - 10 x^2 y^2 + 5 y^4)(x^2 + y^2 - 60 z^2), without the e^{-5t}.
ScalarJet torus_heat_profile(const Eigen::Vector3d& x);
double torus_heat_exact(const Eigen::Vector3d& x, double t);
/// u_t - Delta_Gamma u on the torus R = 1, r = 1/3.
double torus_heat_forcing(const Eigen::Vector3d& x, double t);

/// Solid-body rotation on the unit sphere tilted by alpha; period 2 pi.
Eigen::Vector3d sphere_rotation_velocity(const Eigen::Vector3d& x, double alpha);
/// (east, north) components at longitude lambda, latitude theta.
Eigen::Vector2d sphere_rotation_components(double lambda, double theta, double alpha);
/// (3,2) torus-knot flow on the torus R = 1, r = 1/3; period 2 pi.
Eigen::Vector3d torus_knot_velocity(const Eigen::Vector3d& x);

// ---------------------------------------------------------------------------
// Drivers

enum class PoissonSurface { sphere, tooth };
enum class PoissonTest { u1, u2 };

struct PoissonOptions {
  PoissonSurface surface = PoissonSurface::sphere;
  PoissonTest test = PoissonTest::u1;
  int l = 2;
  int m = 5;
  std::optional<std::size_t> n_s;  // default 2 C(l+3, 3)
  std::size_t n_perp = 10;
  double eps_normal = 0.05;
  double h = 0.1;
  std::optional<std::size_t> n;  // sphere only: explicit node count instead of h
};

/// -Delta_Gamma u = f on z >= 0, u = g on z < 0. Relative l_inf error.
ProblemRun poisson_bvp(const PoissonOptions& options);

struct DiffusionOptions {
  int l = 4;
  int m = 5;
  std::size_t n = 2000;
  std::optional<std::size_t> n_s;  // default floor(1.5 C(l+3, 3))
  std::size_t n_perp = 14;
  double eps_normal = 0.2;
  std::optional<double> t_final;   // 0.5 sphere, 0.2 torus
};

/// u_t = Delta_Gamma u with RK4, dt = 0.5/N. Relative l_inf error.
ProblemRun heat_sphere(const DiffusionOptions& options);
/// u_t = Delta_Gamma u + f on the torus R = 1, r = 1/3. Relative l_inf error.
ProblemRun forced_heat_torus(const DiffusionOptions& options);

enum class AdvectionSurface { sphere, torus };
enum class AdvectionInit { cosine_bell, gaussian_bell };

struct AdvectionOptions {
  AdvectionSurface surface = AdvectionSurface::sphere;
  AdvectionInit init = AdvectionInit::gaussian_bell;
  int l = 4;
  int m = 3;
  std::size_t n = 2000;
  std::optional<std::size_t> n_s;       // floor(1.5 C) sphere, floor(2.2 C) torus
  std::size_t n_perp = 14;
  std::optional<double> eps_normal;     // 0.2 sphere, 0.5 torus
  std::optional<double> epsilon_hyper;  // 0.001 sphere, 0.01 torus
  double alpha = 1.5707963267948966;    // sphere rotation angle
};

struct AdvectionSetup {
  SurfaceNodeSet nodes;
  PhsPolyConfig config;
  Eigen::VectorXd q0;
  SparseMatrixR rhs_matrix;  // -(v . grad) + gamma_k Delta^k
  double dt;
  std::size_t steps;
};

AdvectionSetup advection_setup(const AdvectionOptions& options);
/// One period with RK4. Relative l2 error against the initial field.
ProblemRun advect(const AdvectionOptions& options);
/// Initial tracer field for the given surface.
double advection_initial(AdvectionSurface surface, AdvectionInit init, const Eigen::Vector3d& x);

struct TuringParams {
  double delta_u, delta_v, alpha, beta, gamma, tau1, tau2, final_time;
  static TuringParams spots();
  static TuringParams stripes();
};

/// Reaction terms of the two-species system.
void turing_reaction(const TuringParams& p, const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& fu,
                     Eigen::VectorXd& fv);

struct TuringOptions {
  TuringParams params = TuringParams::spots();
  std::uint64_t seed = 1;
  double amplitude = 0.5;  // initial data uniform in [-amplitude, amplitude]
  double dt = 0.02;
  int l = 6;
  int m = 5;
  std::optional<std::size_t> n_s;  // default 2 C(l+3, 3)
  std::size_t n_perp = 10;
  double eps_normal = 0.1;
  std::optional<double> final_time;
  SolveMethod method = SolveMethod::automatic;
};

/// SBDF1 bootstrap then SBDF2. Fields u, v; stats u_min, u_max, u_std.
ProblemRun turing_static(const SurfaceNodeSet& nodes, const TuringOptions& options);

}  // namespace surfpde
