#include "surfpde/neighbor_index.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "surfpde/error.hpp"

namespace surfpde {

namespace {
constexpr std::size_t kLeafSize = 12;
}

NeighborIndex::NeighborIndex(std::span<const Eigen::Vector3d> points, int dim)
    : points_(points.begin(), points.end()), order_(points.size()), dim_(dim) {
  if (dim < 1 || dim > 3) throw InputError("NeighborIndex: dimension must be 1, 2 or 3");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size());
  }
}

double NeighborIndex::dist2(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
  double s = 0.0;
  for (int c = 0; c < dim_; ++c) {
    double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

int NeighborIndex::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  for (int c = 1; c < dim_; ++c)
    if (hi[c] - lo[c] > hi[axis] - lo[axis]) axis = c;
  if (hi[axis] - lo[axis] == 0.0) return id;  // all coincident: keep as leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];

  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<Neighbor> NeighborIndex::knn(const Eigen::Vector3d& q, std::size_t k) const {
  k = std::min(k, points_.size());
  std::vector<Neighbor> out;
  if (k == 0) return out;

  // Max-heap on (dist2, index): top is the current worst accepted neighbour.
  std::priority_queue<Neighbor> heap;

  auto visit = [&](auto&& self, int id, double box_dist2) -> void {
    if (heap.size() == k && box_dist2 > heap.top().dist2) return;
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        Neighbor cand{order_[i], dist2(points_[order_[i]], q)};
        if (heap.size() < k) {
          heap.push(cand);
        } else if (cand < heap.top()) {
          heap.pop();
          heap.push(cand);
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    self(self, near, box_dist2);
    self(self, far, std::max(box_dist2, diff * diff));
  };
  visit(visit, 0, 0.0);

  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

}  // namespace surfpde
