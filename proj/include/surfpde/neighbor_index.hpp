#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace surfpde {

struct Neighbor {
  std::size_t index;
  double dist2;  // squared Euclidean distance to the query point

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }
};

/// Static kd-tree over a point set for exact k-nearest-neighbour queries.
///
/// Results are ordered by (distance, index), so equidistant points come back
/// in increasing index order and queries are fully deterministic. Only the
/// first `dim` coordinates of each point take part in distance computations.
class NeighborIndex {
public:
  NeighborIndex() = default;
  NeighborIndex(std::span<const Eigen::Vector3d> points, int dim);

  std::size_t size() const { return points_.size(); }
  int dim() const { return dim_; }
  const Eigen::Vector3d& point(std::size_t i) const { return points_[i]; }

  /// The min(k, size()) nearest stored points to q.
  std::vector<Neighbor> knn(const Eigen::Vector3d& q, std::size_t k) const;

private:
  struct Node {
    // Leaves: [begin, end) into order_. Inner nodes: split plane + children.
    std::size_t begin = 0, end = 0;
    int axis = -1;
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  double dist2(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int dim_ = 3;
};

}  // namespace surfpde
