#pragma once

#include <algorithm>
#include <numeric>
#include <span>

#include "convnade/models/common.hpp"
#include "convnade/numerics/ops.hpp"
#include "convnade/numerics/special.hpp"

namespace convnade {

/// Permutation of {0, ..., D-1}; position d is conditioned on positions
/// order[0..d-1].
struct Ordering {
  std::vector<std::size_t> order;

  static Ordering identity(std::size_t dim) {
    Ordering o;
    o.order.resize(dim);
    std::iota(o.order.begin(), o.order.end(), std::size_t{0});
    return o;
  }

  static Ordering random(std::size_t dim, Rng& rng) {
    Ordering o = identity(dim);
    for (std::size_t i = dim; i > 1; --i) std::swap(o.order[i - 1], o.order[rng.below(i)]);
    return o;
  }

  /// Observed patch pixels first (ascending), then the rest ascending.
  static Ordering patch_first(const PixelPatch& patch, std::size_t dim) {
    Ordering o;
    std::vector<std::uint8_t> seen(dim, 0);
    for (std::size_t idx : patch.sorted()) {
      o.order.push_back(idx - 1);
      seen[idx - 1] = 1;
    }
    for (std::size_t i = 0; i < dim; ++i)
      if (!seen[i]) o.order.push_back(i);
    return o;
  }

  void validate(std::size_t dim) const {
    if (order.size() != dim) throw std::invalid_argument("ordering: length differs from dimension");
    std::vector<std::uint8_t> seen(dim, 0);
    for (auto v : order) {
      if (v >= dim || seen[v]) throw std::invalid_argument("ordering: not a permutation");
      seen[v] = 1;
    }
  }
};

/// Tied-weight NADE parameters: W (H, D), V (D, H), b (D), c (H).
template <typename T>
struct NadeParams {
  Tensor<T> W, V, b, c;

  std::size_t hidden() const { return W.dim(0); }
  std::size_t dim() const { return W.dim(1); }

  static NadeParams zeros(std::size_t dim, std::size_t hidden) {
    return {Tensor<T>::zeros({hidden, dim}, true), Tensor<T>::zeros({dim, hidden}, true),
            Tensor<T>::zeros({dim}, true), Tensor<T>::zeros({hidden}, true)};
  }

  static NadeParams glorot(std::size_t dim, std::size_t hidden, Rng& rng) {
    return {glorot_uniform<T>({hidden, dim}, dim, hidden, rng), glorot_uniform<T>({dim, hidden}, hidden, dim, rng),
            Tensor<T>::zeros({dim}, true), Tensor<T>::zeros({hidden}, true)};
  }
};

struct NadeOutput {
  std::vector<double> conditionals;  // p(x_{o_d} = 1 | x_{o_<d}) in ordering order
  double loglik = 0.0;
};

/// Autoregressive pass in O(HD): the hidden pre-activation is carried from
/// one position to the next, a_{d+1} = a_d + W[:, o_d] x_{o_d}.
template <typename T>
NadeOutput nade_forward(std::span<const double> x, const Ordering& ordering, const NadeParams<T>& params) {
  const std::size_t dim = params.dim(), hidden = params.hidden();
  if (x.size() != dim) throw ShapeError("nade_forward: input length differs from D");
  for (double v : x)
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("nade_forward: input must be binary");
  ordering.validate(dim);

  const auto& W = params.W.vec();
  const auto& V = params.V.vec();
  std::vector<double> a(params.c.vec().begin(), params.c.vec().end());
  std::vector<double> h(hidden);
  NadeOutput out;
  out.conditionals.reserve(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const std::size_t od = ordering.order[d];
    double act = static_cast<double>(params.b.vec()[od]);
    for (std::size_t j = 0; j < hidden; ++j) act += static_cast<double>(V[od * hidden + j]) * sigmoid(a[j]);
    const double p = sigmoid(act);
    out.conditionals.push_back(p);
    // log sigma(act) and log(1 - sigma(act)) without cancellation
    out.loglik += x[od] == 1.0 ? -softplus(-act) : -softplus(act);
    if (x[od] == 1.0)
      for (std::size_t j = 0; j < hidden; ++j) a[j] += static_cast<double>(W[j * dim + od]);
  }
  return out;
}

/// NADE trained for patch conditioning. Every unobserved pixel j is
/// predicted with the conditional it has under an ordering that lists the
/// patch first and j next: p(x_j = 1 | x_S) = sigma(V_j sigma(W (x * M) + c) + b_j).
template <typename T>
class Nade {
 public:
  static constexpr Likelihood likelihood = Likelihood::bernoulli;
  static constexpr ModelKind kind = ModelKind::nade;
  using Scalar = T;

  Nade(std::size_t side, std::size_t hidden, Rng& init_rng)
      : side_(side), params_(NadeParams<T>::glorot(side * side, hidden, init_rng)) {}
  Nade(std::size_t side, NadeParams<T> params) : side_(side), params_(std::move(params)) {
    if (params_.dim() != side * side) throw ShapeError("Nade: parameters do not match image size");
  }

  std::size_t image_channels() const { return 1; }
  std::size_t side() const { return side_; }
  std::size_t hidden() const { return params_.hidden(); }
  const NadeParams<T>& params() const { return params_; }
  std::vector<Tensor<T>> parameters() const { return {params_.W, params_.V, params_.b, params_.c}; }

  Tensor<T> forward(const Tensor<T>& images, const Mask& mask, const ForwardOptions& = {}) const {
    const auto x = masked_flat_input(images, mask);
    const auto h = sigmoid(linear(x, params_.W, params_.c));
    const auto p = sigmoid(linear(h, params_.V, params_.b));
    return reshape(p, {images.dim(0), 1, side_, side_});
  }

 private:
  std::size_t side_;
  NadeParams<T> params_;
};

}  // namespace convnade
