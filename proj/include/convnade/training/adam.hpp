#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "convnade/numerics/tensor.hpp"

namespace convnade {

/// Moment estimates are kept in double whatever the parameter precision.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
};

/// One bias-corrected Adam update using the gradients currently stored on
/// `params`. Parameters that received no gradient are treated as having a
/// zero gradient.
template <typename T>
void adam_step(std::vector<Tensor<T>>& params, AdamState& state, double lr) {
  if (state.first.empty()) {
    for (const auto& p : params) {
      state.first.emplace_back(p.size(), 0.0);
      state.second.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first.size() != params.size()) throw ShapeError("adam_step: parameter list changed between steps");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].mutable_values();
    const auto grad = params[k].grad();
    auto& m = state.first[k];
    auto& v = state.second[k];
    if (m.size() != values.size()) throw ShapeError("adam_step: accumulator shape mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad.empty() ? 0.0 : static_cast<double>(grad[i]);
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double update = lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + state.epsilon);
      values[i] = static_cast<T>(static_cast<double>(values[i]) - update);
    }
  }
}

}  // namespace convnade
