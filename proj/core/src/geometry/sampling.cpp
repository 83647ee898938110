#include "opde/geometry/sampling.hpp"

#include <limits>
#include <random>
#include <string>

#include "opde/error.hpp"

namespace opde::geometry {

KeypointSet farthest_point_sample(const Points& vertices, int k, std::uint64_t seed) {
  const Eigen::Index m = vertices.rows();
  if (k < 1 || k > m) {
    throw DomainError("farthest_point_sample: need 1 <= k <= m, got k=" + std::to_string(k) +
                      " m=" + std::to_string(m));
  }

  Eigen::Index start = 0;
  if (seed == 0) {
    const Eigen::RowVector3d centroid = vertices.colwise().mean();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double d = (vertices.row(i) - centroid).squaredNorm();
      if (d < best) {
        best = d;
        start = i;
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    start = std::uniform_int_distribution<Eigen::Index>(0, m - 1)(rng);
  }

  KeypointSet out;
  out.points.resize(k, 3);
  out.vertex_ids.reserve(static_cast<std::size_t>(k));
  Eigen::VectorXd min_d2 = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  Eigen::Index current = start;
  for (int s = 0; s < k; ++s) {
    out.points.row(s) = vertices.row(current);
    out.vertex_ids.push_back(static_cast<int>(current));
    min_d2 = min_d2.cwiseMin((vertices.rowwise() - vertices.row(current)).rowwise().squaredNorm());
    double best = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (min_d2[i] > best) {
        best = min_d2[i];
        current = i;
      }
    }
  }
  return out;
}

}  // namespace opde::geometry
