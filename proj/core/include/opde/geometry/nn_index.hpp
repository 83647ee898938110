#pragma once

#include <cstddef>
#include <vector>

#include "opde/geometry/point_cloud.hpp"

namespace opde::geometry {

struct Neighbor {
  int index = -1;
  double distance = 0.0;  // Euclidean
};

/// Exact nearest-neighbor index (kd-tree with bucket leaves) over 3-D points.
///
/// Results equal an exhaustive scan ordered by (distance, index), i.e. ties
/// resolve to the lowest point index. Queries are const and thread-safe.
class NNIndex {
 public:
  /// Throws DomainError on an empty point set.
  explicit NNIndex(Points points);
  explicit NNIndex(const PointCloud& cloud) : NNIndex(cloud.positions) {}

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  const Points& points() const { return points_; }

  Neighbor nearest(const Vec3& q) const;
  /// Same result as nearest(q); `hint` (any valid point index, typically the
  /// answer for a nearby query) only seeds the search bound.
  Neighbor nearest(const Vec3& q, int hint) const;

  /// The k nearest points sorted by (distance, index); k is clamped to size().
  std::vector<Neighbor> knn(const Vec3& q, int k) const;

  /// Row-major n x k neighbor indices of every indexed point (itself included).
  std::vector<int> knn_graph(int k) const;

 private:
  static constexpr int kLeafSize = 8;

  struct Node {
    int begin = 0, end = 0;   // range into order_ (leaves)
    int left = -1, right = -1;
    int axis = -1;            // -1 for leaves
    double split = 0.0;
  };

  int build(int begin, int end);
  void search_nearest(int node, const Vec3& q, double& best_d2, int& best_idx) const;
  template <typename Heap>
  void search_knn(int node, const Vec3& q, std::size_t k, Heap& heap) const;

  Points points_;
  std::vector<int> order_;
  Points sorted_;  // points_ rows in order_ sequence, so leaves are contiguous
  std::vector<Node> nodes_;
};

}  // namespace opde::geometry
