#pragma once

#include <cstddef>
#include <random>

#include "opde/geometry/point_cloud.hpp"

namespace opde::geometry {

inline constexpr std::size_t kModelPointCount = 4096;
inline constexpr double kDefaultCropFactor = 1.2;

/// Uniform seeded resampling to exactly `count` rows: a sorted random subset
/// when there are more points, every point plus random duplicates when there
/// are fewer. Throws DomainError on an empty cloud.
PointCloud resample(const PointCloud& cloud, std::size_t count, std::mt19937_64& rng);

/// Keeps points within crop_factor * radius of `center`, maps positions to
/// (p - center) / radius (normals untouched) and resamples to `count` points.
///
/// Throws DomainError for radius <= 0 and EmptyCropError when nothing falls
/// inside the crop sphere, which signals an unusable initial pose.
PointCloud normalize_and_crop(const PointCloud& cloud, const Vec3& center, double radius,
                              double crop_factor, std::mt19937_64& rng,
                              std::size_t count = kModelPointCount);

}  // namespace opde::geometry
