#include "opde/pipeline/pose_model.hpp"

#include "opde/error.hpp"
#include "opde/geometry/sampling.hpp"
#include "opde/nn/weights_io.hpp"

namespace opde::pipeline {

PoseModel make_pose_model(const nn::ModelConfig& config, const synth::ObjectSpec& object, std::uint64_t weight_seed,
                          std::uint64_t keypoint_seed) {
  config.validate();
  PoseModel m;
  m.config = config;
  m.object = object;
  const auto mesh = synth::make_object_mesh(object);
  m.keypoints = geometry::farthest_point_sample(mesh.vertex_matrix(), config.n_keypoints, keypoint_seed).points;
  m.params = nn::ModelParams<float>::initialize(config, weight_seed);
  return m;
}

void save_pose_model(const std::filesystem::path& path, const PoseModel& model) {
  nn::TensorFile file;
  nlohmann::json kps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.keypoints.rows(); ++i) {
    kps.push_back({model.keypoints(i, 0), model.keypoints(i, 1), model.keypoints(i, 2)});
  }
  file.metadata = {{"kind", "model"},
                   {"model", nn::to_json(model.config)},
                   {"object", synth::format_object_spec(model.object)},
                   {"crop_factor", model.crop_factor},
                   {"keypoints", kps}};
  file.tensors = model.params.tensors();
  nn::write_tensor_file(path, file);
}

PoseModel load_pose_model(const std::filesystem::path& path) {
  nn::TensorFile file = nn::read_tensor_file(path);
  PoseModel m;
  try {
    if (file.metadata.value("kind", "") != "model") throw DataError(path.string() + " is not a model file");
    m.config = nn::model_config_from_json(file.metadata.at("model"));
    m.object = synth::parse_object_spec(file.metadata.at("object").get<std::string>());
    m.crop_factor = file.metadata.at("crop_factor").get<double>();
    const auto& kps = file.metadata.at("keypoints");
    m.keypoints.resize(static_cast<Eigen::Index>(kps.size()), 3);
    for (std::size_t i = 0; i < kps.size(); ++i) {
      for (int c = 0; c < 3; ++c) m.keypoints(static_cast<Eigen::Index>(i), c) = kps[i][static_cast<std::size_t>(c)].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": bad model metadata: " + e.what());
  } catch (const DomainError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (m.keypoints.rows() != m.config.n_keypoints) throw DataError(path.string() + ": keypoint count mismatch");

  const auto layout = nn::parameter_layout(m.config);
  if (layout.size() != file.tensors.size()) throw DataError(path.string() + ": tensor count does not match the model");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& t = file.tensors[i];
    if (t.name != layout[i].name || t.value.rows() != layout[i].rows || t.value.cols() != layout[i].cols) {
      throw DataError(path.string() + ": unexpected tensor " + t.name);
    }
  }
  m.params = nn::ModelParams<float>::from_tensors(std::move(file.tensors));
  return m;
}

void save_optimizer_state(const std::filesystem::path& path, const nn::ModelParams<float>& params,
                          const nn::AdamState<float>& state) {
  nn::TensorFile file;
  file.metadata = {{"kind", "adam"}, {"step", state.step}};
  const auto& ts = params.tensors();
  for (std::size_t i = 0; i < state.m.size(); ++i) {
    file.tensors.push_back({"adam.m." + ts[i].name, state.m[i], {}});
    file.tensors.push_back({"adam.v." + ts[i].name, state.v[i], {}});
  }
  nn::write_tensor_file(path, file);
}

nn::AdamState<float> load_optimizer_state(const std::filesystem::path& path, const nn::ModelParams<float>& params) {
  const nn::TensorFile file = nn::read_tensor_file(path);
  if (file.metadata.value("kind", "") != "adam") throw DataError(path.string() + " is not an optimizer state file");
  nn::AdamState<float> state;
  state.step = file.metadata.at("step").get<long>();
  if (file.tensors.empty()) return state;
  for (const auto& t : params.tensors()) {
    const auto* m = file.find("adam.m." + t.name);
    const auto* v = file.find("adam.v." + t.name);
    if (!m || !v || m->value.rows() != t.value.rows() || m->value.cols() != t.value.cols() ||
        v->value.rows() != t.value.rows() || v->value.cols() != t.value.cols()) {
      throw DataError(path.string() + ": optimizer state does not match tensor " + t.name);
    }
    state.m.push_back(m->value);
    state.v.push_back(v->value);
  }
  return state;
}

}  // namespace opde::pipeline
