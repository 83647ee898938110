#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "opde/synth/bin_world.hpp"

namespace opde::synth {

struct DatasetConfig {
  ObjectSpec object;
  int scenes = 200;
  int test_scenes = 20;  // the last `test_scenes` scenes form the test split
  int objects_per_scene = 4;
  std::uint64_t seed = 1;
  double min_visibility = 0.5;
  int max_packing_attempts = 500;
  BinWorld::Options world;
};

struct InstanceRecord {
  int scene = 0;
  int object = 0;
  std::string split;  // "train" or "test"
  double visibility = 0.0;
  std::size_t visible_pixels = 0;
  std::size_t solo_pixels = 0;
  std::size_t object_pixels = 0;   // in the close-up view
  std::size_t feature_pixels = 0;  // feature faces in the close-up view
  RigidTransform gt_pose;
  std::string cloud_path;  // relative to the dataset root
  std::string pose_path;
};

struct Dataset {
  DatasetConfig config;
  std::filesystem::path root;
  std::vector<InstanceRecord> instances;
  std::vector<std::string> warnings;

  std::vector<const InstanceRecord*> split(const std::string& name) const;
  geometry::PointCloud load_cloud(const InstanceRecord& record) const;
};

nlohmann::json to_json(const DatasetConfig& config);
DatasetConfig dataset_config_from_json(const nlohmann::json& j);

/// Renders `config.scenes` bin scenes and writes manifest.json plus one PLY
/// cloud and one pose file per instance with visibility >= min_visibility.
/// Output is byte-identical for equal configs. Scenes whose parts cannot be
/// packed within the attempt budget are skipped with a warning.
Dataset generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir,
                         const std::function<void(const std::string&)>& log = {});

/// Throws DataError when the manifest is missing or malformed.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace opde::synth
