#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "surfpde/geometry.hpp"
#include "surfpde/neighbor_index.hpp"
#include "surfpde/phs_config.hpp"

namespace surfpde {

/// Embedded stencil of a reference location: n_s surface nodes (nearest
/// first) and n_perp points at +-j * eps * h along the reference normal.
struct Stencil {
  std::size_t ref_index = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // reference node location
  std::vector<std::size_t> surface_indices;
  std::vector<Eigen::Vector3d> offsurface_points;  // ordered +1, -1, +2, -2, ...
  double eps_normal = 0.0;
  double spacing = 0.0;  // eps * h
};

NeighborIndex build_neighbor_index(const SurfaceNodeSet& nodes);

/// Nearest-first surface neighbours of node i plus its normal extension.
/// With min_sep set, a candidate closer than min_sep to an already accepted
/// member is skipped. Throws InputError when n_perp violates the layout rule
/// or too few admissible neighbours exist.
Stencil build_stencil(const SurfaceNodeSet& nodes, const NeighborIndex& index, std::size_t i,
                      const PhsPolyConfig& config, std::optional<double> min_sep = std::nullopt);

Stencil build_stencil(const SurfaceNodeSet& nodes, std::size_t i, const PhsPolyConfig& config,
                      std::optional<double> min_sep = std::nullopt);

/// The n_perp off-surface points x +- j * spacing * n, j = 1..n_perp/2.
std::vector<Eigen::Vector3d> normal_extension(const Eigen::Vector3d& x, const Eigen::Vector3d& n,
                                              std::size_t n_perp, double spacing);

/// Indices of the n nearest points to q, nearest first, honouring min_sep.
std::vector<std::size_t> select_neighbors(const NeighborIndex& index, const Eigen::Vector3d& q, std::size_t n,
                                          std::optional<double> min_sep);

}  // namespace surfpde
