#include "surfpde/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "surfpde/error.hpp"
#include "surfpde/parallel.hpp"

namespace surfpde {

using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

OperatorMatrix from_rows(std::size_t rows, std::size_t cols, const std::vector<CollapsedWeights>& w) {
  OperatorMatrix M(static_cast<int>(rows), static_cast<int>(cols));
  Eigen::VectorXi per_row(static_cast<int>(rows));
  for (std::size_t i = 0; i < rows; ++i) per_row[static_cast<int>(i)] = static_cast<int>(w[i].indices.size());
  M.reserve(per_row);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = w[i];
    order.resize(row.indices.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row.indices[a] < row.indices[b]; });
    for (std::size_t k : order)
      M.insert(static_cast<int>(i), static_cast<int>(row.indices[k])) = row.values[k];
  }
  M.makeCompressed();
  return M;
}

}  // namespace

OperatorMatrix assemble_rows(const SurfaceNodeSet& nodes, const PhsPolyConfig& config,
                             const std::function<LinearOperatorSpec(std::size_t)>& op_for_row,
                             const AssemblyOptions& options) {
  config.validate();
  if (nodes.dim() != config.dim) throw InputError("assemble: node set dimension differs from config.dim");
  const NeighborIndex index = build_neighbor_index(nodes);
  std::vector<CollapsedWeights> rows(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    if (options.skip_row && options.skip_row(i)) return;
    rows[i] = surface_operator_weights(nodes, index, i, config, op_for_row(i), options.min_sep);
  });
  return from_rows(nodes.size(), nodes.size(), rows);
}

OperatorMatrix assemble(const SurfaceNodeSet& nodes, const PhsPolyConfig& config, const LinearOperatorSpec& op,
                        const AssemblyOptions& options) {
  return assemble_rows(nodes, config, [&](std::size_t) { return op; }, options);
}

OperatorMatrix advection_matrix(const SurfaceNodeSet& nodes, const PhsPolyConfig& config,
                                std::span<const Vector3d> velocity, const AssemblyOptions& options) {
  if (velocity.size() != nodes.size()) throw InputError("advection_matrix: one velocity per node required");
  for (std::size_t i = 0; i < velocity.size(); ++i)
    if (!velocity[i].allFinite()) throw InputError("advection_matrix: non-finite velocity at node " + std::to_string(i));
  return assemble_rows(
      nodes, config, [&](std::size_t i) { return LinearOperatorSpec::directional_derivative(velocity[i]); }, options);
}

int hyperviscosity_power(std::size_t n_s) {
  return static_cast<int>(std::floor(std::log(static_cast<double>(n_s))));
}

OperatorMatrix hyperviscosity_matrix(const SurfaceNodeSet& nodes, const PhsPolyConfig& config, double epsilon_hyper,
                                     std::optional<int> power, const AssemblyOptions& options) {
  const int k = power.value_or(hyperviscosity_power(config.n_s));
  if (k < 1) throw InputError("hyperviscosity_matrix: power must be >= 1");
  if (config.m < 2 * k + 1)
    throw InputError("hyperviscosity_matrix: PHS exponent m = " + std::to_string(config.m) +
                     " is too small for Laplacian power k = " + std::to_string(k) + " (need m >= 2k+1)");
  if (epsilon_hyper == 0.0) {
    config.validate();
    const NeighborIndex index = build_neighbor_index(nodes);
    std::vector<CollapsedWeights> rows(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      rows[i].indices = select_neighbors(index, nodes.point(i), config.n_s, options.min_sep);
      rows[i].values.assign(rows[i].indices.size(), 0.0);
    }
    return from_rows(nodes.size(), nodes.size(), rows);
  }
  const double gamma = epsilon_hyper * (k % 2 == 1 ? 1.0 : -1.0) * std::pow(nodes.h(), 2 * k + 1);
  OperatorMatrix M = assemble(nodes, config, LinearOperatorSpec::laplacian_power(k), options);
  M *= gamma;
  return M;
}

OperatorMatrix interpolation_matrix(const SurfaceNodeSet& source, const PhsPolyConfig& config,
                                    std::span<const Vector3d> targets, const AssemblyOptions& options) {
  config.validate();
  const NeighborIndex index = build_neighbor_index(source);
  const double spacing = config.eps_normal * source.h();
  std::vector<CollapsedWeights> rows(targets.size());
  parallel_for(targets.size(), [&](std::size_t t) {
    const Vector3d& x = targets[t];
    auto idx = select_neighbors(index, x, config.n_s, options.min_sep);
    const std::size_t ref = idx.front();
    std::vector<Vector3d> pts;
    pts.reserve(idx.size() + config.n_perp);
    for (std::size_t j : idx) pts.push_back(source.point(j));
    for (const auto& p : normal_extension(source.point(ref), source.normal(ref), config.n_perp, spacing))
      pts.push_back(p);
    FullStencilWeights full;
    try {
      full = full_stencil_weights_at(pts, idx.size(), source.point(ref), x, config, LinearOperatorSpec::identity());
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at interpolation target " + std::to_string(t));
    }
    const VectorXd w = collapse_weights(full.w_s, full.w_perp);
    rows[t].indices = std::move(idx);
    rows[t].values.assign(w.data(), w.data() + w.size());
  });
  return from_rows(targets.size(), source.size(), rows);
}

void write_matrix_market(const std::filesystem::path& path, const OperatorMatrix& matrix) {
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw InputError("cannot write " + path.string());
  std::fprintf(fp, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(fp, "%ld %ld %ld\n", static_cast<long>(matrix.rows()), static_cast<long>(matrix.cols()),
               static_cast<long>(matrix.nonZeros()));
  for (int i = 0; i < matrix.outerSize(); ++i)
    for (OperatorMatrix::InnerIterator it(matrix, i); it; ++it)
      std::fprintf(fp, "%d %d %.17g\n", i + 1, static_cast<int>(it.col()) + 1, it.value());
  std::fclose(fp);
}

}  // namespace surfpde
