#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace opde::nn {

/// Row-major dense matrix; rows index items (points, edges, samples) and
/// columns index features.
template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A named learnable tensor and its accumulated gradient.
template <typename S>
struct Parameter {
  std::string name;
  Matrix<S> value;
  Matrix<S> grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

}  // namespace opde::nn
