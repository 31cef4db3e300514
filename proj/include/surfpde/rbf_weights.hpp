#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "surfpde/geometry.hpp"
#include "surfpde/phs_config.hpp"
#include "surfpde/stencil.hpp"

namespace surfpde {

/// A linear differential operator realized through its Cartesian counterpart
/// on the embedded stencil.
struct LinearOperatorSpec {
  enum class Kind { identity, laplacian, gradient_component, directional_derivative, laplacian_power };

  Kind kind = Kind::identity;
  int axis = 0;                                         // gradient_component
  Eigen::Vector3d direction = Eigen::Vector3d::Zero();  // directional_derivative
  int power = 1;                                        // laplacian_power

  static LinearOperatorSpec identity() { return {}; }
  static LinearOperatorSpec laplacian() { return {Kind::laplacian}; }
  static LinearOperatorSpec gradient_component(int axis);
  static LinearOperatorSpec directional_derivative(const Eigen::Vector3d& v);
  static LinearOperatorSpec laplacian_power(int k);

  /// Differential order; weights computed in scaled coordinates are divided by
  /// scale^order.
  int order() const;
};

/// Monomial exponents of total degree <= l in d variables, graded
/// lexicographic: 1, x, y, z, x^2, xy, xz, y^2, yz, z^2, ...
std::vector<std::array<int, 3>> monomial_exponents(int l, int d);

/// L op applied to r^m (r = |x - c|) as a function of x, evaluated at x.
/// For laplacian powers the r -> 0 limit is returned when m - 2k >= 1.
double phs_operator_eval(const LinearOperatorSpec& op, int m, const Eigen::Vector3d& x, const Eigen::Vector3d& c,
                         int d);
/// grad_x r^m = m r^(m-2) (x - c).
Eigen::Vector3d phs_gradient(int m, const Eigen::Vector3d& x, const Eigen::Vector3d& c, int d);

Eigen::VectorXd poly_basis(int l, int d, const Eigen::Vector3d& x);
Eigen::VectorXd poly_operator_eval(const LinearOperatorSpec& op, int l, int d, const Eigen::Vector3d& x);

/// The symmetric saddle matrix [A P; P^T 0] for the given (already shifted and
/// scaled) stencil points.
Eigen::MatrixXd saddle_matrix(std::span<const Eigen::Vector3d> points, int m, int l, int d);

struct FullStencilWeights {
  Eigen::VectorXd w_s;     // weights at the n_s surface nodes
  Eigen::VectorXd w_perp;  // weights at the n_perp off-surface points
  double scale = 1.0;      // stencil radius used for conditioning
  double cond_A = 0.0;     // 1-norm condition estimate of A, when requested
};

/// Stencil points in order: surface nodes followed by off-surface points.
std::vector<Eigen::Vector3d> stencil_points(const SurfaceNodeSet& nodes, const Stencil& stencil);

/// Solves the PHS+poly saddle system over the stencil, evaluating op at
/// eval_point (the stencil center when not given). Throws NumericalError on a
/// numerically singular system.
FullStencilWeights full_stencil_weights(const SurfaceNodeSet& nodes, const Stencil& stencil,
                                        const PhsPolyConfig& config, const LinearOperatorSpec& op,
                                        bool want_condition = false);
FullStencilWeights full_stencil_weights_at(std::span<const Eigen::Vector3d> points, std::size_t n_surface,
                                           const Eigen::Vector3d& center, const Eigen::Vector3d& eval_point,
                                           const PhsPolyConfig& config, const LinearOperatorSpec& op,
                                           bool want_condition = false);

struct CollapsedWeights {
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

/// Folds the off-surface weights into the reference (first) surface weight.
Eigen::VectorXd collapse_weights(const Eigen::VectorXd& w_s, const Eigen::VectorXd& w_perp);

CollapsedWeights surface_operator_weights(const SurfaceNodeSet& nodes, const NeighborIndex& index, std::size_t i,
                                          const PhsPolyConfig& config, const LinearOperatorSpec& op,
                                          std::optional<double> min_sep = std::nullopt);
CollapsedWeights surface_operator_weights(const SurfaceNodeSet& nodes, std::size_t i, const PhsPolyConfig& config,
                                          const LinearOperatorSpec& op);

}  // namespace surfpde
