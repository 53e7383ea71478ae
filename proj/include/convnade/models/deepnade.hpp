#pragma once

#include "convnade/models/common.hpp"
#include "convnade/numerics/dropout.hpp"
#include "convnade/numerics/ops.hpp"

namespace convnade {

/// Stacked dense layers W^(l) (H_l, H_{l-1}), c^(l) (H_l) and an output
/// layer V (D, H_L), b (D).
template <typename T>
struct DeepNadeParams {
  std::vector<Tensor<T>> weights;
  std::vector<Tensor<T>> biases;
  Tensor<T> V, b;

  std::size_t dim() const { return V.dim(0); }

  static DeepNadeParams glorot(std::size_t dim, const std::vector<std::size_t>& hidden, Rng& rng) {
    if (hidden.empty()) throw std::invalid_argument("DeepNADE needs at least one hidden layer");
    DeepNadeParams p;
    std::size_t in = dim;
    for (std::size_t h : hidden) {
      p.weights.push_back(glorot_uniform<T>({h, in}, in, h, rng));
      p.biases.push_back(Tensor<T>::zeros({h}, true));
      in = h;
    }
    p.V = glorot_uniform<T>({dim, in}, in, dim, rng);
    p.b = Tensor<T>::zeros({dim}, true);
    return p;
  }
};

/// Conditionals sigma(V h^(L) + b) with h^(0) = x * mask and sigmoid hidden
/// layers. x and mask are flat (B, D) tensors.
template <typename T>
Tensor<T> deepnade_forward(const Tensor<T>& masked_x, const DeepNadeParams<T>& params, const ForwardOptions& opt = {}) {
  Tensor<T> h = masked_x;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    h = sigmoid(linear(h, params.weights[l], params.biases[l]));
    if (opt.training && opt.dropout > 0.0) {
      if (!opt.rng) throw std::invalid_argument("dropout requires a random stream");
      h = dropout(h, opt.dropout, *opt.rng, true);
    }
  }
  return sigmoid(linear(h, params.V, params.b));
}

/// Single-vector form: masks x elementwise, then runs the stack.
template <typename T>
std::vector<double> deepnade_forward(std::span<const double> x, std::span<const double> mask,
                                     const DeepNadeParams<T>& params) {
  if (x.size() != mask.size() || x.size() != params.dim()) {
    throw ShapeError("deepnade_forward: x, mask and parameters disagree on length");
  }
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i] != 0.0 && mask[i] != 1.0) throw std::invalid_argument("deepnade_forward: mask must be binary");
    v[i] = static_cast<T>(x[i] * mask[i]);
  }
  NoGradGuard no_grad;
  const auto p = deepnade_forward(Tensor<T>({1, x.size()}, std::move(v)), params);
  return {p.vec().begin(), p.vec().end()};
}

template <typename T>
class DeepNade {
 public:
  static constexpr Likelihood likelihood = Likelihood::bernoulli;
  static constexpr ModelKind kind = ModelKind::deepnade;
  using Scalar = T;

  DeepNade(std::size_t side, std::vector<std::size_t> hidden, Rng& init_rng)
      : side_(side), hidden_(std::move(hidden)), params_(DeepNadeParams<T>::glorot(side * side, hidden_, init_rng)) {}

  std::size_t image_channels() const { return 1; }
  std::size_t side() const { return side_; }
  const std::vector<std::size_t>& hidden() const { return hidden_; }
  const DeepNadeParams<T>& params() const { return params_; }

  std::vector<Tensor<T>> parameters() const {
    std::vector<Tensor<T>> p;
    for (std::size_t l = 0; l < params_.weights.size(); ++l) {
      p.push_back(params_.weights[l]);
      p.push_back(params_.biases[l]);
    }
    p.push_back(params_.V);
    p.push_back(params_.b);
    return p;
  }

  Tensor<T> forward(const Tensor<T>& images, const Mask& mask, const ForwardOptions& opt = {}) const {
    const auto p = deepnade_forward(masked_flat_input(images, mask), params_, opt);
    return reshape(p, {images.dim(0), 1, side_, side_});
  }

 private:
  std::size_t side_;
  std::vector<std::size_t> hidden_;
  DeepNadeParams<T> params_;
};

}  // namespace convnade
