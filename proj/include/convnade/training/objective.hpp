#pragma once

#include "convnade/models/common.hpp"
#include "convnade/training/losses.hpp"

namespace convnade {

/// Patch loss of a model on a (B, C, N, N) batch: the model sees the
/// observed pixels and is scored on the rest.
template <typename Model, typename T = typename Model::Scalar>
Tensor<T> patch_loss(const Model& model, const Tensor<T>& images, const Mask& mask, const ForwardOptions& opt = {}) {
  if constexpr (Model::likelihood == Likelihood::beta) {
    return beta_patch_loss(model.forward(images, mask, opt), images, mask);
  } else {
    return bernoulli_patch_loss(model.forward(images, mask, opt), images, mask);
  }
}

}  // namespace convnade
