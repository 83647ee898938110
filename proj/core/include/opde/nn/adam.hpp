#pragma once

#include <cmath>
#include <vector>

#include "opde/error.hpp"
#include "opde/nn/tensor.hpp"

namespace opde::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates, one pair per parameter, plus the step count.
template <typename S>
struct AdamState {
  long step = 0;
  std::vector<Matrix<S>> m;
  std::vector<Matrix<S>> v;
};

/// One bias-corrected Adam update using each parameter's accumulated grad.
/// Throws NumericalError naming the first parameter whose gradient is not
/// finite; no parameter is modified in that case.
template <typename S>
void adam_step(std::vector<Parameter<S>>& params, AdamState<S>& state, const AdamConfig& cfg) {
  for (const auto& p : params) {
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) {
      throw ShapeError("adam_step: gradient shape mismatch for " + p.name);
    }
    if (!p.grad.allFinite()) throw NumericalError("non-finite gradient in parameter " + p.name);
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.push_back(Matrix<S>::Zero(p.value.rows(), p.value.cols()));
      state.v.push_back(Matrix<S>::Zero(p.value.rows(), p.value.cols()));
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam_step: optimizer state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const S b1 = static_cast<S>(cfg.beta1);
  const S b2 = static_cast<S>(cfg.beta2);
  const S step_size = static_cast<S>(cfg.lr / c1);
  const S inv_c2 = static_cast<S>(1.0 / c2);
  const S eps = static_cast<S>(cfg.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    m = b1 * m + (S(1) - b1) * p.grad;
    v = b2 * v + (S(1) - b2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= step_size * m.array() / ((v.array() * inv_c2).sqrt() + eps);
  }
}

}  // namespace opde::nn
