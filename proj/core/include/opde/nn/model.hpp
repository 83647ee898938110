#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "opde/error.hpp"
#include "opde/nn/tensor.hpp"

namespace opde::nn {

/// Which inputs reach the keypoint aggregator.
enum class Ablation { full, omit_spatial, omit_features };

std::string to_string(Ablation a);
/// Accepts "full", "omit-spatial"/"omit_spatial", "omit-features"/"omit_features".
Ablation parse_ablation(const std::string& name);

struct ModelConfig {
  int n_points = 4096;
  int in_dims = 6;
  int k_neighbors = 20;
  int feature_dim = 64;     // f, width of the per-point embedding
  int n_keypoints = 32;
  int n_revolution = 360;   // r = 2 * n_revolution samples
  int edge_hidden = 32;     // edge-convolution perceptron width
  int point_hidden = 64;    // per-point perceptron hidden width
  int aggregator_dim = 64;  // width of h_x, h_f and the fused keypoint feature
  int head_hidden = 256;
  double dropout_rate = 0.1;
  Ablation ablation = Ablation::full;

  int n_samples() const { return 2 * n_revolution; }
  bool uses_spatial() const { return ablation != Ablation::omit_spatial; }
  bool uses_features() const { return ablation != Ablation::omit_features; }

  /// Throws DomainError for non-positive sizes or a bad dropout rate.
  void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

struct TensorShape {
  std::string name;
  int rows = 0;
  int cols = 0;
};

/// Names and shapes of every learnable tensor, in storage order.
std::vector<TensorShape> parameter_layout(const ModelConfig& config);
std::size_t parameter_count(const ModelConfig& config);

/// The learnable tensors of encoder, aggregator and scoring head.
template <typename S>
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(const ModelParams& other) : tensors_(other.tensors_) { reindex(); }
  ModelParams(ModelParams&& other) noexcept : tensors_(std::move(other.tensors_)) { reindex(); }
  ModelParams& operator=(const ModelParams& other) {
    tensors_ = other.tensors_;
    reindex();
    return *this;
  }
  ModelParams& operator=(ModelParams&& other) noexcept {
    tensors_ = std::move(other.tensors_);
    reindex();
    return *this;
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
  static ModelParams initialize(const ModelConfig& config, std::uint64_t seed) {
    ModelParams p;
    std::mt19937_64 rng(seed);
    for (const auto& shape : parameter_layout(config)) {
      Parameter<S> t;
      t.name = shape.name;
      t.value.resize(shape.rows, shape.cols);
      const bool is_bias = shape.name.ends_with(".b");
      const int fan_in = is_bias ? fan_in_of_bias(config, shape.name) : shape.rows;
      std::uniform_real_distribution<double> u(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
      for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = static_cast<S>(u(rng));
      t.zero_grad();
      p.tensors_.push_back(std::move(t));
    }
    p.reindex();
    return p;
  }

  /// Zero-filled tensors with the layout of `config`.
  static ModelParams zeros(const ModelConfig& config) {
    ModelParams p;
    for (const auto& shape : parameter_layout(config)) {
      Parameter<S> t;
      t.name = shape.name;
      t.value = Matrix<S>::Zero(shape.rows, shape.cols);
      t.zero_grad();
      p.tensors_.push_back(std::move(t));
    }
    p.reindex();
    return p;
  }

  template <typename T>
  ModelParams<T> cast() const {
    std::vector<Parameter<T>> out;
    for (const auto& t : tensors_) {
      Parameter<T> c;
      c.name = t.name;
      c.value = t.value.template cast<T>();
      c.zero_grad();
      out.push_back(std::move(c));
    }
    return ModelParams<T>::from_tensors(std::move(out));
  }

  static ModelParams from_tensors(std::vector<Parameter<S>> tensors) {
    ModelParams p;
    p.tensors_ = std::move(tensors);
    p.reindex();
    return p;
  }

  bool contains(const std::string& name) const { return index_.contains(name); }
  Parameter<S>& at(const std::string& name) { return tensors_[lookup(name)]; }
  const Parameter<S>& at(const std::string& name) const { return tensors_[lookup(name)]; }

  std::vector<Parameter<S>>& tensors() { return tensors_; }
  const std::vector<Parameter<S>>& tensors() const { return tensors_; }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += static_cast<std::size_t>(t.value.size());
    return n;
  }

  void zero_grad() {
    for (auto& t : tensors_) t.zero_grad();
  }

 private:
  static int fan_in_of_bias(const ModelConfig& config, const std::string& bias_name) {
    const std::string weight = bias_name.substr(0, bias_name.size() - 2) + ".w";
    for (const auto& s : parameter_layout(config)) {
      if (s.name == weight) return s.rows;
    }
    return 1;
  }
  std::size_t lookup(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw ShapeError("model has no tensor named " + name);
    return it->second;
  }
  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < tensors_.size(); ++i) index_[tensors_[i].name] = i;
  }

  std::vector<Parameter<S>> tensors_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace opde::nn
