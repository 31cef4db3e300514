#include "surfpde/rbf_weights.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/LU>
#include <Eigen/QR>

#include "surfpde/error.hpp"

namespace surfpde {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Configuration

std::size_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

bool admissible_n_perp(std::size_t n_perp, int l) {
  if (n_perp % 2 != 0) return false;
  const auto need = static_cast<std::size_t>(l + 1);
  return l % 2 == 1 ? n_perp >= need : n_perp > need;
}

std::size_t default_n_perp(int l) { return l % 2 == 1 ? static_cast<std::size_t>(l + 1) : static_cast<std::size_t>(l + 2); }

std::string PhsPolyConfig::violation() const {
  if (dim != 2 && dim != 3) return "dim must be 2 or 3";
  if (m < 3 || m % 2 == 0) return "m must be odd and >= 3";
  if (l < 0) return "l must be nonnegative";
  if ((m - 1) / 2 > l) return "PHS order q = (m-1)/2 must not exceed l";
  if (n_s < 1) return "n_s must be positive";
  if (!admissible_n_perp(n_perp, l))
    return "n_perp must be even with n_perp >= l+1 (l odd) or n_perp > l+1 (l even)";
  if (poly_size() >= n_s + n_perp) return "polynomial basis size L must be below n_s + n_perp";
  if (!(eps_normal > 0.0 && eps_normal < 1.0)) return "eps_normal must lie in (0, 1)";
  return {};
}

void PhsPolyConfig::validate() const {
  if (auto v = violation(); !v.empty()) throw InputError("invalid RBF-FD configuration: " + v);
}

PhsPolyConfig PhsPolyConfig::with_defaults(int l, int dim, int m, double eps_normal) {
  PhsPolyConfig c;
  c.m = m;
  c.l = l;
  c.dim = dim;
  c.n_s = 2 * binomial(l + dim, l);
  c.n_perp = default_n_perp(l);
  c.eps_normal = eps_normal;
  return c;
}

// ---------------------------------------------------------------------------
// Operators

LinearOperatorSpec LinearOperatorSpec::gradient_component(int axis) {
  if (axis < 0 || axis > 2) throw InputError("gradient_component: axis must be 0, 1 or 2");
  LinearOperatorSpec op{Kind::gradient_component};
  op.axis = axis;
  return op;
}

LinearOperatorSpec LinearOperatorSpec::directional_derivative(const Vector3d& v) {
  if (!v.allFinite()) throw InputError("directional_derivative: non-finite direction");
  LinearOperatorSpec op{Kind::directional_derivative};
  op.direction = v;
  return op;
}

LinearOperatorSpec LinearOperatorSpec::laplacian_power(int k) {
  if (k < 1) throw InputError("laplacian_power: k must be >= 1");
  LinearOperatorSpec op{Kind::laplacian_power};
  op.power = k;
  return op;
}

int LinearOperatorSpec::order() const {
  switch (kind) {
    case Kind::identity: return 0;
    case Kind::laplacian: return 2;
    case Kind::gradient_component:
    case Kind::directional_derivative: return 1;
    case Kind::laplacian_power: return 2 * power;
  }
  return 0;
}

std::vector<std::array<int, 3>> monomial_exponents(int l, int d) {
  std::vector<std::array<int, 3>> out;
  for (int deg = 0; deg <= l; ++deg) {
    if (d == 1) {
      out.push_back({deg, 0, 0});
    } else if (d == 2) {
      for (int a = deg; a >= 0; --a) out.push_back({a, deg - a, 0});
    } else {
      for (int a = deg; a >= 0; --a)
        for (int b = deg - a; b >= 0; --b) out.push_back({a, b, deg - a - b});
    }
  }
  return out;
}

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

double dist(const Vector3d& x, const Vector3d& c, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
  return std::sqrt(s);
}

// r^p for odd or even integer p >= 0 given r.
double rpow(double r, int p) { return p == 0 ? 1.0 : ipow(r, p); }

double laplacian_power_factor(int m, int d, int k) {
  double f = 1.0;
  for (int i = 1; i <= k; ++i) f *= static_cast<double>(m - 2 * i + 2) * static_cast<double>(m + d - 2 * i);
  return f;
}

using Poly = std::map<std::array<int, 3>, double>;

Poly laplacian_of(const Poly& p, int d) {
  Poly out;
  for (const auto& [e, c] : p)
    for (int a = 0; a < d; ++a)
      if (e[a] >= 2) {
        auto e2 = e;
        e2[a] -= 2;
        out[e2] += c * e[a] * (e[a] - 1);
      }
  return out;
}

double eval_poly(const Poly& p, const Vector3d& x) {
  double s = 0.0;
  for (const auto& [e, c] : p) s += c * ipow(x[0], e[0]) * ipow(x[1], e[1]) * ipow(x[2], e[2]);
  return s;
}

double monomial(const std::array<int, 3>& e, const Vector3d& x) {
  return ipow(x[0], e[0]) * ipow(x[1], e[1]) * ipow(x[2], e[2]);
}

double monomial_derivative(const std::array<int, 3>& e, int axis, const Vector3d& x) {
  if (e[axis] == 0) return 0.0;
  auto e2 = e;
  e2[axis] -= 1;
  return e[axis] * monomial(e2, x);
}

}  // namespace

double phs_operator_eval(const LinearOperatorSpec& op, int m, const Vector3d& x, const Vector3d& c, int d) {
  const double r = dist(x, c, d);
  using K = LinearOperatorSpec::Kind;
  switch (op.kind) {
    case K::identity: return rpow(r, m);
    case K::gradient_component: {
      if (op.axis >= d) return 0.0;
      return m * rpow(r, m - 2) * (x[op.axis] - c[op.axis]);
    }
    case K::directional_derivative: {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += op.direction[a] * (x[a] - c[a]);
      return m * rpow(r, m - 2) * s;
    }
    case K::laplacian: return static_cast<double>(m) * (m + d - 2) * rpow(r, m - 2);
    case K::laplacian_power: {
      const int p = m - 2 * op.power;
      if (p < 1) throw InputError("phs_operator_eval: laplacian power requires m - 2k >= 1");
      return laplacian_power_factor(m, d, op.power) * rpow(r, p);
    }
  }
  throw InputError("phs_operator_eval: unsupported operator");
}

Vector3d phs_gradient(int m, const Vector3d& x, const Vector3d& c, int d) {
  const double f = m * rpow(dist(x, c, d), m - 2);
  Vector3d g = Vector3d::Zero();
  for (int a = 0; a < d; ++a) g[a] = f * (x[a] - c[a]);
  return g;
}

VectorXd poly_basis(int l, int d, const Vector3d& x) {
  const auto exps = monomial_exponents(l, d);
  VectorXd out(exps.size());
  for (std::size_t j = 0; j < exps.size(); ++j) out[j] = monomial(exps[j], x);
  return out;
}

VectorXd poly_operator_eval(const LinearOperatorSpec& op, int l, int d, const Vector3d& x) {
  const auto exps = monomial_exponents(l, d);
  VectorXd out(exps.size());
  using K = LinearOperatorSpec::Kind;
  for (std::size_t j = 0; j < exps.size(); ++j) {
    const auto& e = exps[j];
    switch (op.kind) {
      case K::identity: out[j] = monomial(e, x); break;
      case K::gradient_component: out[j] = op.axis < d ? monomial_derivative(e, op.axis, x) : 0.0; break;
      case K::directional_derivative: {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += op.direction[a] * monomial_derivative(e, a, x);
        out[j] = s;
        break;
      }
      case K::laplacian:
      case K::laplacian_power: {
        Poly p{{e, 1.0}};
        const int k = op.kind == K::laplacian ? 1 : op.power;
        for (int i = 0; i < k && !p.empty(); ++i) p = laplacian_of(p, d);
        out[j] = eval_poly(p, x);
        break;
      }
    }
  }
  return out;
}

MatrixXd saddle_matrix(std::span<const Vector3d> points, int m, int l, int d) {
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto exps = monomial_exponents(l, d);
  const auto L = static_cast<Eigen::Index>(exps.size());
  MatrixXd M = MatrixXd::Zero(n + L, n + L);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = rpow(dist(points[i], points[j], d), m);
      M(i, j) = v;
      M(j, i) = v;
    }
    for (Eigen::Index k = 0; k < L; ++k) {
      const double v = monomial(exps[k], points[i]);
      M(i, n + k) = v;
      M(n + k, i) = v;
    }
  }
  return M;
}

std::vector<Vector3d> stencil_points(const SurfaceNodeSet& nodes, const Stencil& stencil) {
  std::vector<Vector3d> pts;
  pts.reserve(stencil.surface_indices.size() + stencil.offsurface_points.size());
  for (std::size_t j : stencil.surface_indices) pts.push_back(nodes.point(j));
  for (const auto& p : stencil.offsurface_points) pts.push_back(p);
  return pts;
}

namespace {

// Points on an algebraic surface of degree <= l leave P without full column
// rank: the surface polynomial times anything vanishing on the normal line is
// zero at every stencil point. Only the polynomial multipliers are then
// undetermined; w is unique as long as the operator is consistent on the
// dependent columns. Keep a maximal independent set of monomials (pivoted
// QR), solve the smaller saddle system, then check the dropped constraints.
VectorXd reduced_basis_weights(const MatrixXd& M, const VectorXd& rhs, Eigen::Index n, double lu_ratio) {
  const Eigen::Index L = M.rows() - n;
  auto fail = [&](const std::string& why) {
    return NumericalError("full_stencil_weights: numerically rank-deficient saddle system (pivot ratio " +
                          std::to_string(lu_ratio) + ", " + why + ")");
  };
  Eigen::ColPivHouseholderQR<MatrixXd> qr(M.topRightCorner(n, L));
  qr.setThreshold(1e-11);
  const Eigen::Index r = qr.rank();
  if (r == 0) throw fail("polynomial block is degenerate");
  const auto& perm = qr.colsPermutation().indices();

  MatrixXd Mr = MatrixXd::Zero(n + r, n + r);
  Mr.topLeftCorner(n, n) = M.topLeftCorner(n, n);
  VectorXd br(n + r);
  br.head(n) = rhs.head(n);
  for (Eigen::Index k = 0; k < r; ++k) {
    Mr.col(n + k).head(n) = M.col(n + perm[k]).head(n);
    Mr.row(n + k).head(n) = M.col(n + perm[k]).head(n).transpose();
    br[n + k] = rhs[n + perm[k]];
  }
  Eigen::PartialPivLU<MatrixXd> lu(Mr);
  const auto piv = lu.matrixLU().diagonal().cwiseAbs();
  if (!(piv.minCoeff() >= 1e-14 * piv.maxCoeff())) throw fail("reduced system is singular");
  const VectorXd w = lu.solve(br).head(n);

  for (Eigen::Index k = r; k < L; ++k) {
    const auto col = M.col(n + perm[k]).head(n);
    const double got = col.dot(w);
    const double mag = col.cwiseAbs().dot(w.cwiseAbs());
    const double want = rhs[n + perm[k]];
    if (!(std::abs(got - want) <= 1e-8 * std::max({mag, std::abs(want), 1e-300})))
      throw fail("operator is inconsistent on the dependent monomials");
  }
  return w;
}

}  // namespace

FullStencilWeights full_stencil_weights_at(std::span<const Vector3d> points, std::size_t n_surface,
                                           const Vector3d& center, const Vector3d& eval_point,
                                           const PhsPolyConfig& config, const LinearOperatorSpec& op,
                                           bool want_condition) {
  const int d = config.dim;
  const std::size_t n = points.size();
  if (n_surface > n) throw InputError("full_stencil_weights: surface count exceeds stencil size");

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, dist(p, center, d));
  if (scale == 0.0) scale = 1.0;

  std::vector<Vector3d> y(n);
  for (std::size_t j = 0; j < n; ++j) y[j] = (points[j] - center) / scale;
  const Vector3d e = (eval_point - center) / scale;

  const MatrixXd M = saddle_matrix(y, config.m, config.l, d);
  const auto L = M.rows() - static_cast<Eigen::Index>(n);

  VectorXd rhs(M.rows());
  for (std::size_t j = 0; j < n; ++j) rhs[static_cast<Eigen::Index>(j)] = phs_operator_eval(op, config.m, e, y[j], d);
  rhs.tail(L) = poly_operator_eval(op, config.l, d, e);

  Eigen::PartialPivLU<MatrixXd> lu(M);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  VectorXd w;
  if (pivots.minCoeff() >= 1e-14 * pivots.maxCoeff()) {
    w = lu.solve(rhs).head(static_cast<Eigen::Index>(n));
  } else {
    w = reduced_basis_weights(M, rhs, static_cast<Eigen::Index>(n), pivots.minCoeff() / pivots.maxCoeff());
  }
  if (!w.allFinite()) throw NumericalError("full_stencil_weights: non-finite weights");

  FullStencilWeights out;
  const double unscale = std::pow(scale, -op.order());
  w *= unscale;
  out.w_s = w.head(static_cast<Eigen::Index>(n_surface));
  out.w_perp = w.tail(static_cast<Eigen::Index>(n - n_surface));
  out.scale = scale;
  if (want_condition) {
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::PartialPivLU<MatrixXd> alu(M.topLeftCorner(nn, nn));
    out.cond_A = 1.0 / alu.rcond();
  }
  return out;
}

FullStencilWeights full_stencil_weights(const SurfaceNodeSet& nodes, const Stencil& stencil,
                                        const PhsPolyConfig& config, const LinearOperatorSpec& op,
                                        bool want_condition) {
  if (stencil.surface_indices.size() != config.n_s)
    throw InputError("full_stencil_weights: stencil size does not match n_s");
  if (nodes.dim() != config.dim) throw InputError("full_stencil_weights: dimension mismatch");
  const auto pts = stencil_points(nodes, stencil);
  try {
    return full_stencil_weights_at(pts, stencil.surface_indices.size(), stencil.center, stencil.center, config, op,
                                   want_condition);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " at node " + std::to_string(stencil.ref_index));
  }
}

VectorXd collapse_weights(const VectorXd& w_s, const VectorXd& w_perp) {
  VectorXd out = w_s;
  if (out.size() > 0) out[0] += w_perp.sum();
  return out;
}

CollapsedWeights surface_operator_weights(const SurfaceNodeSet& nodes, const NeighborIndex& index, std::size_t i,
                                          const PhsPolyConfig& config, const LinearOperatorSpec& op,
                                          std::optional<double> min_sep) {
  const Stencil s = build_stencil(nodes, index, i, config, min_sep);
  const auto full = full_stencil_weights(nodes, s, config, op);
  const VectorXd w = collapse_weights(full.w_s, full.w_perp);
  CollapsedWeights out;
  out.indices = s.surface_indices;
  out.values.assign(w.data(), w.data() + w.size());
  return out;
}

CollapsedWeights surface_operator_weights(const SurfaceNodeSet& nodes, std::size_t i, const PhsPolyConfig& config,
                                          const LinearOperatorSpec& op) {
  return surface_operator_weights(nodes, build_neighbor_index(nodes), i, config, op);
}

}  // namespace surfpde
