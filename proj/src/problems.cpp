#include "surfpde/problems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "surfpde/error.hpp"
#include "surfpde/parallel.hpp"
#include "surfpde/timestep.hpp"

namespace surfpde {

using Eigen::Matrix3d;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

VectorXd sample(const SurfaceNodeSet& nodes, const std::function<double(const Vector3d&)>& f) {
  VectorXd v(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(nodes.point(i));
  return v;
}

std::size_t stencil_size(double factor, int l) {
  return static_cast<std::size_t>(std::floor(factor * static_cast<double>(binomial(l + 3, 3))));
}

PhsPolyConfig make_config(int l, int m, std::size_t n_s, std::size_t n_perp, double eps) {
  PhsPolyConfig c;
  c.l = l;
  c.m = m;
  c.dim = 3;
  c.n_s = n_s;
  c.n_perp = n_perp;
  c.eps_normal = eps;
  c.validate();
  return c;
}

}  // namespace

double ProblemRun::stat(const std::string& key) const {
  for (const auto& [k, v] : stats)
    if (k == key) return v;
  throw InputError("ProblemRun: no statistic named " + key);
}

std::vector<ConvergenceRow> convergence_table(const std::vector<ProblemRun>& runs) {
  std::vector<ConvergenceRow> rows;
  for (const auto& r : runs)
    rows.push_back({r.nodes.size(), r.nodes.h(), r.error, std::numeric_limits<double>::quiet_NaN(), r.wall_seconds});
  if (rows.size() >= 2) {
    std::vector<double> e, h;
    for (const auto& r : rows) {
      e.push_back(r.error);
      h.push_back(r.h);
    }
    const auto orders = eoc(e, h);
    for (std::size_t i = 0; i < orders.size(); ++i) rows[i + 1].eoc = orders[i];
  }
  return rows;
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows) {
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw InputError("cannot write " + path.string());
  std::fprintf(fp, "n,h,error,eoc\n");
  for (const auto& r : rows) {
    if (std::isnan(r.eoc))
      std::fprintf(fp, "%zu,%.10g,%.10g,\n", r.n, r.h, r.error);
    else
      std::fprintf(fp, "%zu,%.10g,%.10g,%.6f\n", r.n, r.h, r.error, r.eoc);
  }
  std::fclose(fp);
}

void write_timing_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows) {
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw InputError("cannot write " + path.string());
  std::fprintf(fp, "n,wall_seconds\n");
  for (const auto& r : rows) std::fprintf(fp, "%zu,%.3f\n", r.n, r.wall_seconds);
  std::fclose(fp);
}

void write_run_ply(const std::filesystem::path& path, const ProblemRun& run) {
  std::vector<NamedField> fields;
  for (const auto& [name, v] : run.fields)
    fields.push_back({name, std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))});
  write_ply(path, run.nodes, fields);
}

SurfaceNodeSet sphere_nodes_for_spacing(double h) {
  if (!(h > 0.0 && h < 1.0)) throw InputError("sphere spacing must lie in (0, 1)");
  const auto guess = std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(std::pow(3.6 / h, 2))));
  const SurfaceNodeSet first = fibonacci_sphere_nodes(guess);
  const auto n = std::max<std::size_t>(
      4, static_cast<std::size_t>(std::lround(static_cast<double>(guess) * std::pow(first.h() / h, 2))));
  return n == guess ? first : fibonacci_sphere_nodes(n);
}

// ---------------------------------------------------------------------------
// Exact data

ScalarJet poisson_u1(const Vector3d& x) {
  const double a = 0.75 * kPi, b = kPi, c = 1.5 * kPi;
  const double c1 = std::cos(a * x.x()), s1 = std::sin(a * x.x());
  const double c2 = std::cos(b * x.y()), s2 = std::sin(b * x.y());
  const double c3 = std::cos(c * x.z()), s3 = std::sin(c * x.z());
  ScalarJet j;
  j.value = -c1 * c2 * s3;
  j.gradient = {a * s1 * c2 * s3, b * c1 * s2 * s3, -c * c1 * c2 * c3};
  j.hessian(0, 0) = a * a * c1 * c2 * s3;
  j.hessian(1, 1) = b * b * c1 * c2 * s3;
  j.hessian(2, 2) = c * c * c1 * c2 * s3;
  j.hessian(0, 1) = j.hessian(1, 0) = -a * b * s1 * s2 * s3;
  j.hessian(0, 2) = j.hessian(2, 0) = a * c * s1 * c2 * c3;
  j.hessian(1, 2) = j.hessian(2, 1) = b * c * c1 * s2 * c3;
  return j;
}

ScalarJet poisson_u2(const Vector3d& x) {
  ScalarJet j;
  j.value = -x.x() * x.y();
  j.gradient = {-x.y(), -x.x(), 0.0};
  j.hessian.setZero();
  j.hessian(0, 1) = j.hessian(1, 0) = -1.0;
  return j;
}

double heat_sphere_exact(const Vector3d& x, double t) {
  const std::complex<double> w(x.x(), x.y());
  std::complex<double> p = 1.0;
  double sum = 0.0;
  for (int l = 1; l <= 30; ++l) {
    p *= w;
    const double dl = l;
    // sqrt(2) sqrt((2l+1)/(4 pi)) sqrt((2l)!) / (2^l l!)
    const double log_norm = 0.5 * std::log(2.0) + 0.5 * std::log((2.0 * dl + 1.0) / (4.0 * kPi)) +
                            0.5 * std::lgamma(2.0 * dl + 1.0) - dl * std::log(2.0) - std::lgamma(dl + 1.0);
    sum += std::exp(log_norm - dl * dl / 9.0 - t * dl * (dl + 1.0)) * p.real();
  }
  return 20.0 / (3.0 * kPi) * sum;
}

ScalarJet torus_heat_profile(const Vector3d& x) {
  const double X = x.x(), Y = x.y(), Z = x.z();
  const double X2 = X * X, Y2 = Y * Y;
  const double P = X * (X2 * X2 - 10.0 * X2 * Y2 + 5.0 * Y2 * Y2);
  const Vector3d dP(5.0 * X2 * X2 - 30.0 * X2 * Y2 + 5.0 * Y2 * Y2, -20.0 * X2 * X * Y + 20.0 * X * Y2 * Y, 0.0);
  Matrix3d HP = Matrix3d::Zero();
  HP(0, 0) = 20.0 * X2 * X - 60.0 * X * Y2;
  HP(1, 1) = -HP(0, 0);
  HP(0, 1) = HP(1, 0) = -60.0 * X2 * Y + 20.0 * Y2 * Y;
  const double Q = X2 + Y2 - 60.0 * Z * Z;
  const Vector3d dQ(2.0 * X, 2.0 * Y, -120.0 * Z);
  const Matrix3d HQ = Eigen::Vector3d(2.0, 2.0, -120.0).asDiagonal();
  ScalarJet j;
  j.value = P * Q / 8.0;
  j.gradient = (Q * dP + P * dQ) / 8.0;
  j.hessian = (Q * HP + dP * dQ.transpose() + dQ * dP.transpose() + P * HQ) / 8.0;
  return j;
}

double torus_heat_exact(const Vector3d& x, double t) { return std::exp(-5.0 * t) * torus_heat_profile(x).value; }

double torus_heat_forcing(const Vector3d& x, double t) {
  static const ImplicitSurface torus = surfaces::torus(1.0, 1.0 / 3.0);
  const ScalarJet j = torus_heat_profile(x);
  return std::exp(-5.0 * t) * (-5.0 * j.value - surface_laplacian(torus, x, j.gradient, j.hessian));
}

Vector3d sphere_rotation_velocity(const Vector3d& x, double alpha) {
  const Vector3d omega(0.0, -std::sin(alpha), -std::cos(alpha));
  return omega.cross(x);
}

Eigen::Vector2d sphere_rotation_components(double lambda, double theta, double alpha) {
  return {std::sin(theta) * std::sin(lambda) * std::sin(alpha) - std::cos(theta) * std::cos(alpha),
          std::cos(lambda) * std::sin(alpha)};
}

Vector3d torus_knot_velocity(const Vector3d& x) {
  const double rho = std::hypot(x.x(), x.y());
  if (rho == 0.0) throw InputError("torus_knot_velocity: point on the symmetry axis");
  const Vector3d d_azimuth(-x.y(), x.x(), 0.0);
  const Vector3d d_poloidal(-x.z() * x.x() / rho, -x.z() * x.y() / rho, rho - 1.0);
  return 3.0 * d_azimuth + 2.0 * d_poloidal;
}

double advection_initial(AdvectionSurface surface, AdvectionInit init, const Vector3d& x) {
  if (surface == AdvectionSurface::sphere) {
    if (init == AdvectionInit::gaussian_bell) return std::exp(-6.0 * (x - Vector3d(1.0, 0.0, 0.0)).squaredNorm());
    const double r = std::acos(std::clamp(x.x() / x.norm(), -1.0, 1.0));
    const double rb = 1.0 / 3.0;
    return r < rb ? 0.5 * (1.0 + std::cos(kPi * r / rb)) : 0.0;
  }
  const Vector3d p1(4.0 / 3.0, 0.0, 0.0);
  if (init == AdvectionInit::gaussian_bell) {
    const double a = 20.0;
    auto g = [&](const Vector3d& p) {
      const Vector3d d = x - p;
      return std::exp(-a * (d.x() * d.x() + d.y() * d.y() + 1.5 * d.z() * d.z()));
    };
    return g(p1) + g(-p1);
  }
  auto bell = [&](const Vector3d& p) {
    const double r = (x - p).norm();
    return r < 0.5 ? 0.5 * (1.0 + std::cos(2.0 * kPi * r)) : 0.0;
  };
  return 0.1 + 0.9 * (bell(p1) + bell(-p1));
}

// ---------------------------------------------------------------------------
// Drivers

ProblemRun poisson_bvp(const PoissonOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const PhsPolyConfig config =
      make_config(o.l, o.m, o.n_s.value_or(2 * binomial(o.l + 3, 3)), o.n_perp, o.eps_normal);
  const ImplicitSurface surface = o.surface == PoissonSurface::sphere ? surfaces::unit_sphere() : surfaces::tooth();
  SurfaceNodeSet nodes = o.surface == PoissonSurface::sphere
                             ? (o.n ? fibonacci_sphere_nodes(*o.n) : sphere_nodes_for_spacing(o.h))
                             : implicit_surface_nodes(surface, o.h);
  auto exact = o.test == PoissonTest::u1 ? poisson_u1 : poisson_u2;

  const auto n = nodes.size();
  AssemblyOptions opts;
  opts.skip_row = [&](std::size_t i) { return nodes.point(i).z() < 0.0; };
  const SparseMatrixR L = assemble(nodes, config, LinearOperatorSpec::laplacian(), opts);

  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(static_cast<std::size_t>(L.nonZeros()) + n);
  VectorXd b(static_cast<Eigen::Index>(n)), u_exact(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<int>(i);
    const ScalarJet j = exact(nodes.point(i));
    u_exact[ii] = j.value;
    if (nodes.point(i).z() < 0.0) {
      trip.emplace_back(ii, ii, 1.0);
      b[ii] = j.value;
    } else {
      for (SparseMatrixR::InnerIterator it(L, ii); it; ++it) trip.emplace_back(ii, static_cast<int>(it.col()), -it.value());
      b[ii] = -surface_laplacian(surface, nodes.point(i), j.gradient, j.hessian);
    }
  }
  SparseMatrixR M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  M.setFromTriplets(trip.begin(), trip.end());
  SolveStats st;
  const VectorXd u = linear_solve(M, b, SolveMethod::automatic, 1e-12, &st);

  ProblemRun run{std::string("poisson_") + (o.surface == PoissonSurface::sphere ? "sphere" : "tooth") + "_" +
                     (o.test == PoissonTest::u1 ? "u1" : "u2"),
                 std::move(nodes), config};
  run.error = rel_error(u, u_exact, ErrorNorm::linf);
  run.norm = ErrorNorm::linf;
  run.fields = {{"u", u}, {"u_exact", u_exact}};
  run.stats = {{"solver_residual", st.relative_residual}, {"solver_iterations", st.iterations}};
  run.wall_seconds = seconds_since(t0);
  return run;
}

namespace {

ProblemRun diffusion(const DiffusionOptions& o, bool torus) {
  const auto t0 = std::chrono::steady_clock::now();
  const PhsPolyConfig config =
      make_config(o.l, o.m, o.n_s.value_or(stencil_size(1.5, o.l)), o.n_perp, o.eps_normal);
  SurfaceNodeSet nodes = torus ? torus_nodes(o.n, 1.0, 1.0 / 3.0) : fibonacci_sphere_nodes(o.n);
  const double t_final = o.t_final.value_or(torus ? 0.2 : 0.5);
  if (!(t_final > 0.0)) throw InputError("diffusion: final time must be positive");
  const SparseMatrixR L = assemble(nodes, config, LinearOperatorSpec::laplacian());

  const auto n = nodes.size();
  const double dt_rule = 0.5 / static_cast<double>(n);
  const auto steps = static_cast<std::size_t>(std::max(1L, std::lround(t_final / dt_rule)));
  const double dt = t_final / static_cast<double>(steps);

  VectorXd u0, u_exact, u;
  if (!torus) {
    u0 = sample(nodes, [](const Vector3d& x) { return heat_sphere_exact(x, 0.0); });
    u_exact = sample(nodes, [&](const Vector3d& x) { return heat_sphere_exact(x, t_final); });
    u = rk4_advance(L, u0, dt, steps);
  } else {
    u0 = sample(nodes, [](const Vector3d& x) { return torus_heat_exact(x, 0.0); });
    u_exact = sample(nodes, [&](const Vector3d& x) { return torus_heat_exact(x, t_final); });
    const VectorXd g = sample(nodes, [](const Vector3d& x) { return torus_heat_forcing(x, 0.0); });
    u = rk4_advance(
        [&](double t, const VectorXd& v, VectorXd& out) {
          out.noalias() = L * v;
          out += std::exp(-5.0 * t) * g;
        },
        u0, 0.0, dt, steps);
  }
  ProblemRun run{torus ? "heat_torus" : "heat_sphere", std::move(nodes), config};
  run.dt = dt;
  run.steps = steps;
  run.error = rel_error(u, u_exact, ErrorNorm::linf);
  run.norm = ErrorNorm::linf;
  run.fields = {{"u", u}, {"u_exact", u_exact}};
  run.wall_seconds = seconds_since(t0);
  return run;
}

}  // namespace

ProblemRun heat_sphere(const DiffusionOptions& options) { return diffusion(options, false); }
ProblemRun forced_heat_torus(const DiffusionOptions& options) { return diffusion(options, true); }

AdvectionSetup advection_setup(const AdvectionOptions& o) {
  const bool sphere = o.surface == AdvectionSurface::sphere;
  if (o.n < 500) throw InputError("advection: N must be at least 500");
  const PhsPolyConfig config = make_config(o.l, o.m, o.n_s.value_or(stencil_size(sphere ? 1.5 : 2.2, o.l)), o.n_perp,
                                           o.eps_normal.value_or(sphere ? 0.2 : 0.5));
  SurfaceNodeSet nodes = sphere ? fibonacci_sphere_nodes(o.n) : torus_nodes(o.n, 1.0, 1.0 / 3.0);

  std::vector<Vector3d> vel(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    vel[i] = sphere ? sphere_rotation_velocity(nodes.point(i), o.alpha) : torus_knot_velocity(nodes.point(i));
  const SparseMatrixR D = advection_matrix(nodes, config, vel);

  const int k = hyperviscosity_power(config.n_s);
  PhsPolyConfig hv = config;
  hv.m = std::max(config.m, 2 * k + 1);
  const SparseMatrixR H = hyperviscosity_matrix(nodes, hv, o.epsilon_hyper.value_or(sphere ? 0.001 : 0.01), k);

  const double T = 2.0 * kPi;
  const double v_max = sphere ? 1.0 : 4.1;
  const double dt_rule = T / (10.0 * v_max * std::sqrt(static_cast<double>(nodes.size())));
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt_rule - 1e-9));
  VectorXd q0 = sample(nodes, [&](const Vector3d& x) { return advection_initial(o.surface, o.init, x); });
  SparseMatrixR A = H - D;
  A.makeCompressed();
  return {std::move(nodes), config, std::move(q0), std::move(A), T / static_cast<double>(steps), steps};
}

ProblemRun advect(const AdvectionOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  AdvectionSetup s = advection_setup(o);
  VectorXd q = s.q0;
  const double q0_norm = std::max(s.q0.norm(), std::numeric_limits<double>::min());
  const std::size_t chunk = 50;
  for (std::size_t done = 0; done < s.steps;) {
    const std::size_t k = std::min(chunk, s.steps - done);
    try {
      q = rk4_advance(s.rhs_matrix, q, s.dt, k);
    } catch (const NumericalError&) {
      throw NumericalError("advection: instability, state became non-finite near step " + std::to_string(done + k));
    }
    done += k;
    if (q.norm() > 10.0 * q0_norm)
      throw NumericalError("advection: instability, solution norm grew more than 10x by step " + std::to_string(done));
  }
  const bool sphere = o.surface == AdvectionSurface::sphere;
  const bool gauss = o.init == AdvectionInit::gaussian_bell;
  ProblemRun run{std::string("advect_") + (sphere ? "sphere" : "torus") + (gauss ? "_gaussian" : "_cosine"),
                 std::move(s.nodes), s.config};
  run.dt = s.dt;
  run.steps = s.steps;
  run.error = rel_error(q, s.q0, ErrorNorm::l2);
  run.norm = ErrorNorm::l2;
  run.stats = {{"max_abs_initial", s.q0.lpNorm<Eigen::Infinity>()}, {"max_abs_final", q.lpNorm<Eigen::Infinity>()}};
  run.fields = {{"q", q}, {"q_exact", s.q0}};
  run.wall_seconds = seconds_since(t0);
  return run;
}

TuringParams TuringParams::spots() { return {0.516 * 4.5e-3, 4.5e-3, 0.899, -0.91, -0.899, 0.02, 0.2, 600.0}; }
TuringParams TuringParams::stripes() { return {0.516 * 2.1e-3, 2.1e-3, 0.899, -0.91, -0.899, 3.5, 0.0, 6000.0}; }

void turing_reaction(const TuringParams& p, const VectorXd& u, const VectorXd& v, VectorXd& fu, VectorXd& fv) {
  fu = (p.alpha * u.array() * (1.0 - p.tau1 * v.array().square()) + v.array() * (1.0 - p.tau2 * u.array())).matrix();
  fv = (p.beta * v.array() * (1.0 + (p.alpha * p.tau1 / p.beta) * u.array() * v.array()) +
        u.array() * (p.gamma + p.tau2 * v.array()))
           .matrix();
}

ProblemRun turing_static(const SurfaceNodeSet& nodes, const TuringOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const TuringParams& p = o.params;
  if (!(p.delta_u > 0.0 && p.delta_v > 0.0)) throw InputError("turing: diffusivities must be positive");
  if (!(o.dt > 0.0)) throw InputError("turing: dt must be positive");
  const PhsPolyConfig config =
      make_config(o.l, o.m, o.n_s.value_or(2 * binomial(o.l + 3, 3)), o.n_perp, o.eps_normal);
  const double t_final = o.final_time.value_or(p.final_time);
  const auto steps = static_cast<std::size_t>(std::lround(t_final / o.dt));
  const SparseMatrixR L = assemble(nodes, config, LinearOperatorSpec::laplacian());

  const auto n = static_cast<Eigen::Index>(nodes.size());
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> dist(-o.amplitude, o.amplitude);
  VectorXd u(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = dist(rng);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);

  const double dt = o.dt;
  VectorXd fu(n), fv(n), fu_prev(n), fv_prev(n), u_prev, v_prev;
  auto guard = [&](std::size_t step) {
    if (!u.allFinite() || !v.allFinite() || u.lpNorm<Eigen::Infinity>() > 1e6 || v.lpNorm<Eigen::Infinity>() > 1e6)
      throw NumericalError("turing: blow-up at step " + std::to_string(step));
  };
  if (steps > 0) {
    LinearSolver su1(identity_minus(L, dt * p.delta_u), o.method);
    LinearSolver sv1(identity_minus(L, dt * p.delta_v), o.method);
    turing_reaction(p, u, v, fu, fv);
    u_prev = u;
    v_prev = v;
    u = su1.solve(u + dt * fu, &u_prev);
    v = sv1.solve(v + dt * fv, &v_prev);
    guard(1);
  }
  if (steps > 1) {
    LinearSolver su2(identity_minus(L, 2.0 * dt * p.delta_u / 3.0), o.method);
    LinearSolver sv2(identity_minus(L, 2.0 * dt * p.delta_v / 3.0), o.method);
    fu_prev = fu;
    fv_prev = fv;
    VectorXd ru(n), rv(n);
    for (std::size_t s = 1; s < steps; ++s) {
      turing_reaction(p, u, v, fu, fv);
      ru = (4.0 * u - u_prev + 2.0 * dt * (2.0 * fu - fu_prev)) / 3.0;
      rv = (4.0 * v - v_prev + 2.0 * dt * (2.0 * fv - fv_prev)) / 3.0;
      u_prev.swap(u);
      v_prev.swap(v);
      u = su2.solve(ru, &u_prev);
      v = sv2.solve(rv, &v_prev);
      fu_prev.swap(fu);
      fv_prev.swap(fv);
      guard(s + 1);
    }
  }

  const double mean = u.mean();
  const double sd = std::sqrt((u.array() - mean).square().mean());
  const double mean_v = v.mean();
  const double sd_v = std::sqrt((v.array() - mean_v).square().mean());
  ProblemRun run{"turing", nodes, config};
  run.dt = dt;
  run.steps = steps;
  run.error = std::numeric_limits<double>::quiet_NaN();
  run.stats = {{"u_min", u.minCoeff()}, {"u_max", u.maxCoeff()}, {"u_std", sd}, {"v_std", sd_v},
               {"u_max_abs", u.lpNorm<Eigen::Infinity>()}};
  run.fields = {{"u", u}, {"v", v}};
  run.wall_seconds = seconds_since(t0);
  return run;
}

}  // namespace surfpde
