#pragma once

#include <cstdint>
#include <vector>

#include "opde/geometry/point_cloud.hpp"

namespace opde::geometry {

/// Object keypoints (object frame, meters) with the mesh vertices they came from.
struct KeypointSet {
  Points points;
  std::vector<int> vertex_ids;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

/// Greedy farthest point sampling over mesh vertices.
///
/// seed 0 starts at the vertex nearest the vertex centroid; any other seed
/// picks the start vertex uniformly with a generator seeded by it. Each
/// subsequent pick maximizes the distance to the already chosen set, ties
/// going to the lowest vertex index. Throws DomainError unless 1 <= k <= m.
KeypointSet farthest_point_sample(const Points& vertices, int k, std::uint64_t seed = 0);

}  // namespace opde::geometry
