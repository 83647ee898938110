#include "opde/synth/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "opde/error.hpp"

namespace opde::synth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json pose_json(const RigidTransform& t) {
  json rows = json::array();
  const auto m = t.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) rows.push_back(m(r, c));
  }
  return rows;
}

RigidTransform pose_from_json(const json& j) {
  if (!j.is_array() || j.size() != 16) throw DataError("manifest: pose must have 16 numbers");
  geometry::Mat4 m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = j.at(static_cast<std::size_t>(i)).get<double>();
  try {
    return RigidTransform::from_matrix(m);
  } catch (const DomainError& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
}

std::string scene_dir_name(int scene) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%05d", scene);
  return buf;
}

}  // namespace

std::vector<const InstanceRecord*> Dataset::split(const std::string& name) const {
  std::vector<const InstanceRecord*> out;
  for (const auto& r : instances) {
    if (r.split == name) out.push_back(&r);
  }
  return out;
}

geometry::PointCloud Dataset::load_cloud(const InstanceRecord& record) const {
  return geometry::read_ply_file((root / record.cloud_path).string());
}

json to_json(const DatasetConfig& c) {
  return json{
      {"object", format_object_spec(c.object)},
      {"scenes", c.scenes},
      {"test_scenes", c.test_scenes},
      {"objects_per_scene", c.objects_per_scene},
      {"seed", c.seed},
      {"min_visibility", c.min_visibility},
      {"max_packing_attempts", c.max_packing_attempts},
      {"bin", {{"inner_width", c.world.bin.inner_width}, {"floor_z", c.world.bin.floor_z},
               {"wall_height", c.world.bin.wall_height}}},
      {"scene_resolution", c.world.scene_resolution},
      {"instance_resolution", c.world.instance_resolution},
      {"instance_crop_factor", c.world.instance_crop_factor},
      {"drop_height", c.world.drop_height},
  };
}

DatasetConfig dataset_config_from_json(const json& j) {
  DatasetConfig c;
  c.object = parse_object_spec(j.at("object").get<std::string>());
  c.scenes = j.at("scenes").get<int>();
  c.test_scenes = j.at("test_scenes").get<int>();
  c.objects_per_scene = j.at("objects_per_scene").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.min_visibility = j.at("min_visibility").get<double>();
  c.max_packing_attempts = j.at("max_packing_attempts").get<int>();
  c.world.bin.inner_width = j.at("bin").at("inner_width").get<double>();
  c.world.bin.floor_z = j.at("bin").at("floor_z").get<double>();
  c.world.bin.wall_height = j.at("bin").at("wall_height").get<double>();
  c.world.scene_resolution = j.at("scene_resolution").get<int>();
  c.world.instance_resolution = j.at("instance_resolution").get<int>();
  c.world.instance_crop_factor = j.at("instance_crop_factor").get<double>();
  c.world.drop_height = j.at("drop_height").get<double>();
  return c;
}

Dataset generate_dataset(const DatasetConfig& config, const fs::path& out_dir,
                         const std::function<void(const std::string&)>& log) {
  if (config.scenes < 1 || config.objects_per_scene < 1 || config.test_scenes < 0 ||
      config.test_scenes > config.scenes) {
    throw DomainError("generate_dataset: invalid scene counts");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create dataset directory " + out_dir.string() + ": " + ec.message());

  const BinWorld world(config.object, config.world);
  Dataset ds;
  ds.config = config;
  ds.root = out_dir;

  for (int s = 0; s < config.scenes; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    std::vector<RigidTransform> poses;
    bool packed = true;
    for (int o = 0; o < config.objects_per_scene; ++o) {
      auto pose = world.sample_pose(rng, poses, config.max_packing_attempts);
      if (!pose) {
        packed = false;
        break;
      }
      poses.push_back(*pose);
    }
    if (!packed) {
      ds.warnings.push_back("scene " + std::to_string(s) + " skipped: packing failed");
      if (log) log("warning: " + ds.warnings.back());
      continue;
    }

    const Scene scene = world.render(poses);
    const std::string dir = scene_dir_name(s);
    fs::create_directories(out_dir / dir, ec);
    if (ec) throw DataError("cannot create " + (out_dir / dir).string());
    const std::string split = s >= config.scenes - config.test_scenes ? "test" : "train";
    for (std::size_t o = 0; o < poses.size(); ++o) {
      if (scene.visibilities[o] < config.min_visibility) continue;
      const InstanceView view = world.render_instance(poses, o);
      if (view.cloud.empty()) continue;
      char name[32];
      std::snprintf(name, sizeof(name), "obj_%02zu", o);
      InstanceRecord rec;
      rec.scene = s;
      rec.object = static_cast<int>(o);
      rec.split = split;
      rec.visibility = scene.visibilities[o];
      rec.visible_pixels = scene.visible_pixels[o];
      rec.solo_pixels = scene.solo_pixels[o];
      rec.object_pixels = view.object_pixels;
      rec.feature_pixels = view.feature_pixels;
      rec.gt_pose = poses[o];
      rec.cloud_path = dir + "/" + name + ".ply";
      rec.pose_path = dir + "/" + name + "_pose.txt";
      geometry::write_ply_file((out_dir / rec.cloud_path).string(), view.cloud);
      geometry::write_transform_file((out_dir / rec.pose_path).string(), rec.gt_pose);
      ds.instances.push_back(std::move(rec));
    }
    if (log && (s + 1) % 25 == 0) {
      log("rendered " + std::to_string(s + 1) + "/" + std::to_string(config.scenes) + " scenes, " +
          std::to_string(ds.instances.size()) + " instances");
    }
  }

  json manifest;
  manifest["format"] = "opde-dataset";
  manifest["version"] = 1;
  manifest["config"] = to_json(config);
  manifest["warnings"] = ds.warnings;
  json list = json::array();
  for (const auto& r : ds.instances) {
    list.push_back({{"scene", r.scene},
                    {"object", r.object},
                    {"split", r.split},
                    {"visibility", r.visibility},
                    {"visible_pixels", r.visible_pixels},
                    {"solo_pixels", r.solo_pixels},
                    {"object_pixels", r.object_pixels},
                    {"feature_pixels", r.feature_pixels},
                    {"gt_pose", pose_json(r.gt_pose)},
                    {"cloud", r.cloud_path},
                    {"pose", r.pose_path}});
  }
  manifest["instances"] = std::move(list);
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw DataError("cannot write manifest in " + out_dir.string());
  out << manifest.dump(1) << '\n';
  return ds;
}

Dataset load_dataset(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw DataError("no manifest.json in " + dir.string());
  Dataset ds;
  ds.root = dir;
  try {
    const json manifest = json::parse(in);
    ds.config = dataset_config_from_json(manifest.at("config"));
    ds.warnings = manifest.value("warnings", std::vector<std::string>{});
    for (const auto& j : manifest.at("instances")) {
      InstanceRecord r;
      r.scene = j.at("scene").get<int>();
      r.object = j.at("object").get<int>();
      r.split = j.at("split").get<std::string>();
      r.visibility = j.at("visibility").get<double>();
      r.visible_pixels = j.at("visible_pixels").get<std::size_t>();
      r.solo_pixels = j.at("solo_pixels").get<std::size_t>();
      r.object_pixels = j.at("object_pixels").get<std::size_t>();
      r.feature_pixels = j.at("feature_pixels").get<std::size_t>();
      r.gt_pose = pose_from_json(j.at("gt_pose"));
      r.cloud_path = j.at("cloud").get<std::string>();
      r.pose_path = j.at("pose").get<std::string>();
      ds.instances.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw DataError("malformed manifest in " + dir.string() + ": " + e.what());
  } catch (const DomainError& e) {
    throw DataError("malformed manifest in " + dir.string() + ": " + e.what());
  }
  return ds;
}

}  // namespace opde::synth
