#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>

#include <Eigen/Sparse>

#include "surfpde/geometry.hpp"
#include "surfpde/rbf_weights.hpp"

namespace surfpde {

/// Row-compressed differentiation matrix, n_s stored entries per row with
/// strictly increasing column indices.
using OperatorMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct AssemblyOptions {
  std::optional<double> min_sep;  // minimum separation among stencil members
  std::function<bool(std::size_t)> skip_row;  // rows left empty when true
};

/// Row i holds the collapsed weights of op at node i.
OperatorMatrix assemble(const SurfaceNodeSet& nodes, const PhsPolyConfig& config, const LinearOperatorSpec& op,
                        const AssemblyOptions& options = {});

/// Same with a per-row operator (e.g. a frozen local velocity).
OperatorMatrix assemble_rows(const SurfaceNodeSet& nodes, const PhsPolyConfig& config,
                             const std::function<LinearOperatorSpec(std::size_t)>& op_for_row,
                             const AssemblyOptions& options = {});

/// v . grad_Gamma with row i using the directional derivative along v(x_i).
OperatorMatrix advection_matrix(const SurfaceNodeSet& nodes, const PhsPolyConfig& config,
                                std::span<const Eigen::Vector3d> velocity, const AssemblyOptions& options = {});

/// k = floor(ln n_s) unless overridden.
int hyperviscosity_power(std::size_t n_s);

/// gamma_k Delta^k with gamma_k = eps (-1)^(k+1) h^(2k+1). Requires m >= 2k+1.
OperatorMatrix hyperviscosity_matrix(const SurfaceNodeSet& nodes, const PhsPolyConfig& config, double epsilon_hyper,
                                     std::optional<int> power = std::nullopt, const AssemblyOptions& options = {});

/// M x N matrix evaluating the identity-operator interpolant of the source
/// nodes at each target. The normal extension is attached at the nearest
/// source node, whose weight absorbs the off-surface weights.
OperatorMatrix interpolation_matrix(const SurfaceNodeSet& source, const PhsPolyConfig& config,
                                    std::span<const Eigen::Vector3d> targets, const AssemblyOptions& options = {});

/// %%MatrixMarket matrix coordinate real general, 1-based indices.
void write_matrix_market(const std::filesystem::path& path, const OperatorMatrix& matrix);

}  // namespace surfpde
