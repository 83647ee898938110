#include "opde/geometry/preprocess.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "opde/error.hpp"

namespace opde::geometry {

PointCloud resample(const PointCloud& cloud, std::size_t count, std::mt19937_64& rng) {
  const std::size_t m = cloud.size();
  if (m == 0) throw DomainError("resample: empty cloud");
  std::vector<std::size_t> picks;
  picks.reserve(count);
  if (m >= count) {
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), std::size_t{0});
    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = std::uniform_int_distribution<std::size_t>(i, m - 1)(rng);
      std::swap(all[i], all[j]);
    }
    picks.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(picks.begin(), picks.end());
  } else {
    picks.resize(m);
    std::iota(picks.begin(), picks.end(), std::size_t{0});
    std::uniform_int_distribution<std::size_t> any(0, m - 1);
    while (picks.size() < count) picks.push_back(any(rng));
  }
  return cloud.select(picks);
}

PointCloud normalize_and_crop(const PointCloud& cloud, const Vec3& center, double radius,
                              double crop_factor, std::mt19937_64& rng, std::size_t count) {
  if (!(radius > 0.0)) throw DomainError("normalize_and_crop: radius must be positive");
  if (!(crop_factor > 0.0)) throw DomainError("normalize_and_crop: crop_factor must be positive");
  const double limit2 = (crop_factor * radius) * (crop_factor * radius);
  std::vector<Eigen::Index> keep;
  keep.reserve(cloud.size());
  for (Eigen::Index i = 0; i < cloud.positions.rows(); ++i) {
    if ((cloud.positions.row(i).transpose() - center).squaredNorm() <= limit2) keep.push_back(i);
  }
  if (keep.empty()) throw EmptyCropError("empty crop: no points within the crop sphere of the initial pose");

  PointCloud cropped = cloud.select(keep);
  cropped.positions = (cropped.positions.rowwise() - center.transpose()) / radius;
  return resample(cropped, count, rng);
}

}  // namespace opde::geometry
