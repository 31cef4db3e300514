#include "surfpde/stencil.hpp"

#include <algorithm>

#include "surfpde/error.hpp"

namespace surfpde {

using Eigen::Vector3d;

NeighborIndex build_neighbor_index(const SurfaceNodeSet& nodes) { return NeighborIndex(nodes.points(), nodes.dim()); }

std::vector<Vector3d> normal_extension(const Vector3d& x, const Vector3d& n, std::size_t n_perp, double spacing) {
  std::vector<Vector3d> out;
  out.reserve(n_perp);
  for (std::size_t j = 1; j <= n_perp / 2; ++j) {
    const double d = static_cast<double>(j) * spacing;
    out.push_back(x + d * n);
    out.push_back(x - d * n);
  }
  return out;
}

std::vector<std::size_t> select_neighbors(const NeighborIndex& index, const Vector3d& q, std::size_t n,
                                          std::optional<double> min_sep) {
  if (index.size() < n) throw InputError("stencil: node set smaller than the stencil size");
  if (!min_sep || *min_sep <= 0.0) {
    auto found = index.knn(q, n);
    std::vector<std::size_t> out(found.size());
    for (std::size_t j = 0; j < found.size(); ++j) out[j] = found[j].index;
    return out;
  }

  const double sep2 = *min_sep * *min_sep;
  std::size_t k = std::min(index.size(), 2 * n);
  while (true) {
    const auto found = index.knn(q, k);
    std::vector<std::size_t> accepted;
    accepted.reserve(n);
    for (const auto& cand : found) {
      const Vector3d& p = index.point(cand.index);
      bool ok = true;
      for (std::size_t a : accepted)
        if ((index.point(a) - p).squaredNorm() < sep2) {
          ok = false;
          break;
        }
      if (!ok) continue;
      accepted.push_back(cand.index);
      if (accepted.size() == n) return accepted;
    }
    if (k == index.size())
      throw InputError("stencil: not enough neighbours satisfy the minimum separation");
    k = std::min(index.size(), 2 * k);
  }
}

Stencil build_stencil(const SurfaceNodeSet& nodes, const NeighborIndex& index, std::size_t i,
                      const PhsPolyConfig& config, std::optional<double> min_sep) {
  if (i >= nodes.size()) throw InputError("build_stencil: node index out of range");
  if (!admissible_n_perp(config.n_perp, config.l))
    throw InputError("build_stencil: n_perp = " + std::to_string(config.n_perp) +
                     " violates the normal-extension rule for l = " + std::to_string(config.l) +
                     " (even, >= l+1 for odd l, > l+1 for even l)");
  if (nodes.size() < config.n_s) throw InputError("build_stencil: fewer nodes than n_s");

  Stencil s;
  s.ref_index = i;
  s.center = nodes.point(i);
  s.surface_indices = select_neighbors(index, nodes.point(i), config.n_s, min_sep);
  // The query point is a stored node, so it comes first unless a duplicate ties
  // with a smaller index; force it to the front to keep sigma(1) = i.
  if (s.surface_indices.front() != i) {
    auto it = std::find(s.surface_indices.begin(), s.surface_indices.end(), i);
    if (it != s.surface_indices.end()) s.surface_indices.erase(it);
    else s.surface_indices.pop_back();
    s.surface_indices.insert(s.surface_indices.begin(), i);
  }
  s.eps_normal = config.eps_normal;
  s.spacing = config.eps_normal * nodes.h();
  s.offsurface_points = normal_extension(nodes.point(i), nodes.normal(i), config.n_perp, s.spacing);
  return s;
}

Stencil build_stencil(const SurfaceNodeSet& nodes, std::size_t i, const PhsPolyConfig& config,
                      std::optional<double> min_sep) {
  return build_stencil(nodes, build_neighbor_index(nodes), i, config, min_sep);
}

}  // namespace surfpde
