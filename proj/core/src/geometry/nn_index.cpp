#include "opde/geometry/nn_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "opde/error.hpp"

namespace opde::geometry {
namespace {

struct Candidate {
  double d2;
  int index;
  // Max-heap on (d2, index): the top is the worst kept neighbor.
  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && index < o.index); }
};

inline double dist2(double x, double y, double z, const Vec3& q) {
  const double dx = x - q.x();
  const double dy = y - q.y();
  const double dz = z - q.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

NNIndex::NNIndex(Points points) : points_(std::move(points)) {
  if (points_.rows() == 0) throw DomainError("NNIndex: empty point set");
  order_.resize(static_cast<std::size_t>(points_.rows()));
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * order_.size() / kLeafSize + 1);
  build(0, static_cast<int>(order_.size()));
  sorted_.resize(points_.rows(), 3);
  for (std::size_t i = 0; i < order_.size(); ++i) sorted_.row(static_cast<Eigen::Index>(i)) = points_.row(order_[i]);
}

int NNIndex::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  Eigen::RowVector3d lo = Eigen::RowVector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::RowVector3d hi = -lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_.row(order_[static_cast<std::size_t>(i)]));
    hi = hi.cwiseMax(points_.row(order_[static_cast<std::size_t>(i)]));
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all points coincide

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_(a, axis) < points_(b, axis); });
  const double split = points_(order_[static_cast<std::size_t>(mid)], axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void NNIndex::search_nearest(int node_id, const Vec3& q, double& best_d2, int& best_idx) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const double d2 = dist2(sorted_(i, 0), sorted_(i, 1), sorted_(i, 2), q);
      if (d2 > best_d2) continue;
      const int idx = order_[static_cast<std::size_t>(i)];
      if (d2 < best_d2 || idx < best_idx) {
        best_d2 = d2;
        best_idx = idx;
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search_nearest(near, q, best_d2, best_idx);
  if (diff * diff <= best_d2) search_nearest(far, q, best_d2, best_idx);
}

Neighbor NNIndex::nearest(const Vec3& q) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_idx = std::numeric_limits<int>::max();
  search_nearest(0, q, best_d2, best_idx);
  return {best_idx, std::sqrt(best_d2)};
}

Neighbor NNIndex::nearest(const Vec3& q, int hint) const {
  if (hint < 0 || hint >= points_.rows()) return nearest(q);
  double best_d2 = dist2(points_(hint, 0), points_(hint, 1), points_(hint, 2), q);
  int best_idx = hint;
  search_nearest(0, q, best_d2, best_idx);
  return {best_idx, std::sqrt(best_d2)};
}

template <typename Heap>
void NNIndex::search_knn(int node_id, const Vec3& q, std::size_t k, Heap& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[static_cast<std::size_t>(i)];
      const Candidate c{dist2(sorted_(i, 0), sorted_(i, 1), sorted_(i, 2), q), idx};
      if (heap.size() < k) {
        heap.push(c);
      } else if (c < heap.top()) {
        heap.pop();
        heap.push(c);
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search_knn(near, q, k, heap);
  if (heap.size() < k || diff * diff <= heap.top().d2) search_knn(far, q, k, heap);
}

std::vector<Neighbor> NNIndex::knn(const Vec3& q, int k) const {
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), size());
  std::priority_queue<Candidate> heap;
  if (kk > 0) search_knn(0, q, kk, heap);
  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = {heap.top().index, std::sqrt(heap.top().d2)};
    heap.pop();
  }
  return out;
}

std::vector<int> NNIndex::knn_graph(int k) const {
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), size());
  std::vector<int> out;
  out.reserve(size() * kk);
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    for (const auto& nb : knn(points_.row(i).transpose(), static_cast<int>(kk))) out.push_back(nb.index);
  }
  return out;
}

}  // namespace opde::geometry
