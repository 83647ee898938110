#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "opde/nn/tensor.hpp"

namespace opde::nn {

/// Contents of a tensor file: a JSON metadata block plus named f32 tensors.
struct TensorFile {
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<Parameter<float>> tensors;

  const Parameter<float>* find(const std::string& name) const;
};

/// Little-endian binary layout, see docs/weight_format.md.
void write_tensor_file(const std::filesystem::path& path, const TensorFile& file);
/// Throws DataError on a bad magic, unsupported version, truncation or
/// inconsistent offsets.
TensorFile read_tensor_file(const std::filesystem::path& path);

}  // namespace opde::nn
