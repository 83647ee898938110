#include "opde/nn/model.hpp"

#include <nlohmann/json.hpp>

namespace opde::nn {

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::omit_spatial: return "omit-spatial";
    case Ablation::omit_features: return "omit-features";
  }
  return "unknown";
}

Ablation parse_ablation(const std::string& name) {
  if (name == "full") return Ablation::full;
  if (name == "omit-spatial" || name == "omit_spatial") return Ablation::omit_spatial;
  if (name == "omit-features" || name == "omit_features") return Ablation::omit_features;
  throw DomainError("unknown ablation: " + name);
}

void ModelConfig::validate() const {
  for (int v : {n_points, in_dims, k_neighbors, feature_dim, n_keypoints, n_revolution, edge_hidden, point_hidden,
                aggregator_dim, head_hidden}) {
    if (v <= 0) throw DomainError("ModelConfig: all sizes must be positive");
  }
  if (k_neighbors > n_points) throw DomainError("ModelConfig: k_neighbors exceeds n_points");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw DomainError("ModelConfig: dropout_rate must be in [0, 1)");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"n_points", c.n_points},         {"in_dims", c.in_dims},
          {"k_neighbors", c.k_neighbors},   {"feature_dim", c.feature_dim},
          {"n_keypoints", c.n_keypoints},   {"n_revolution", c.n_revolution},
          {"edge_hidden", c.edge_hidden},   {"point_hidden", c.point_hidden},
          {"aggregator_dim", c.aggregator_dim}, {"head_hidden", c.head_hidden},
          {"dropout_rate", c.dropout_rate}, {"ablation", to_string(c.ablation)}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.n_points = j.at("n_points").get<int>();
  c.in_dims = j.at("in_dims").get<int>();
  c.k_neighbors = j.at("k_neighbors").get<int>();
  c.feature_dim = j.at("feature_dim").get<int>();
  c.n_keypoints = j.at("n_keypoints").get<int>();
  c.n_revolution = j.at("n_revolution").get<int>();
  c.edge_hidden = j.at("edge_hidden").get<int>();
  c.point_hidden = j.at("point_hidden").get<int>();
  c.aggregator_dim = j.at("aggregator_dim").get<int>();
  c.head_hidden = j.at("head_hidden").get<int>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.ablation = parse_ablation(j.at("ablation").get<std::string>());
  c.validate();
  return c;
}

std::vector<TensorShape> parameter_layout(const ModelConfig& c) {
  c.validate();
  std::vector<TensorShape> out;
  auto dense = [&](const std::string& name, int in, int outw) {
    out.push_back({name + ".w", in, outw});
    out.push_back({name + ".b", 1, outw});
  };
  const int a = c.aggregator_dim;
  if (c.uses_features()) {
    dense("encoder.edge1", 2 * c.in_dims, c.edge_hidden);
    dense("encoder.edge2", c.edge_hidden, c.edge_hidden);
    dense("encoder.point1", c.edge_hidden, c.point_hidden);
    dense("encoder.point2", c.point_hidden, c.feature_dim);
    dense("encoder.fuse", 2 * c.feature_dim, c.feature_dim);
  }
  if (c.uses_spatial()) {
    dense("aggregator.hx1", 3, a);
    dense("aggregator.hx2", a, a);
  }
  if (c.uses_features()) {
    dense("aggregator.hf1", c.feature_dim, a);
    dense("aggregator.hf2", a, a);
  }
  const int branches = (c.uses_spatial() ? 1 : 0) + (c.uses_features() ? 1 : 0);
  dense("aggregator.fuse1", branches * a, a);
  dense("aggregator.fuse2", a, a);
  dense("head.l1", c.n_keypoints * a, c.head_hidden);
  dense("head.l2", c.head_hidden, c.head_hidden);
  dense("head.l3", c.head_hidden, 1);
  return out;
}

std::size_t parameter_count(const ModelConfig& config) {
  std::size_t n = 0;
  for (const auto& s : parameter_layout(config)) n += static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols);
  return n;
}

}  // namespace opde::nn
