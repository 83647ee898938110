#pragma once

#include <vector>

#include "opde/error.hpp"
#include "opde/nn/autodiff.hpp"
#include "opde/nn/model.hpp"

namespace opde::nn {

/// Per-point embedding network: one edge convolution over the k-NN graph,
/// a shared per-point perceptron, and a global max-pool fused back into
/// every point. Output is n x feature_dim and permutation-equivariant.
///
/// `features` is n x in_dims (position, normal); `knn` is the row-major
/// n x k neighbor table (each point lists itself). Throws ShapeError when n
/// differs from config.n_points or the table has the wrong size.
template <typename S>
Var encode_points(Graph<S>& g, ModelParams<S>& params, const ModelConfig& config, const Matrix<S>& features,
                  const std::vector<int>& knn) {
  const Eigen::Index n = features.rows();
  const int k = config.k_neighbors;
  if (n != config.n_points) {
    throw ShapeError("encoder expects " + std::to_string(config.n_points) + " points, got " + std::to_string(n));
  }
  if (features.cols() != config.in_dims) throw ShapeError("encoder input has the wrong number of channels");
  if (knn.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(k)) {
    throw ShapeError("encoder neighbor table has the wrong size");
  }
  if (!config.uses_features()) throw DomainError("encoder is not part of an omit-features model");

  auto p = [&](const std::string& name) { return g.parameter(params.at(name)); };

  const Var x = g.constant(features);
  const Var local = g.edge_conv(x, knn, k, p("encoder.edge1.w"), p("encoder.edge1.b"), p("encoder.edge2.w"),
                                p("encoder.edge2.b"));

  Var pt = g.relu(g.linear(local, p("encoder.point1.w"), p("encoder.point1.b")));
  pt = g.relu(g.linear(pt, p("encoder.point2.w"), p("encoder.point2.b")));
  const Var global = g.broadcast_rows(g.max_over_rows(pt), n);
  return g.relu(g.linear(g.concat_cols(pt, global), p("encoder.fuse.w"), p("encoder.fuse.b")));
}

}  // namespace opde::nn
