#pragma once

#include "convnade/models/architecture.hpp"
#include "convnade/models/common.hpp"
#include "convnade/numerics/conv.hpp"
#include "convnade/numerics/dropout.hpp"
#include "convnade/numerics/ops.hpp"

namespace convnade {

/// Shared convolutional trunk: masked image plus mask channel in, final
/// pre-activation A^(L) out. Hidden layers use the logistic sigmoid and,
/// when training, dropout after each activation.
template <typename T>
class ConvStack {
 public:
  ConvStack() = default;

  ConvStack(ConvArchitecture arch, std::size_t side, Rng& init_rng) : arch_(std::move(arch)), side_(side) {
    arch_.validate(side_);
    std::size_t in = arch_.input_channels;
    for (const auto& l : arch_.layers) {
      FilterBank<T> bank;
      bank.weight = glorot_uniform<T>({l.out_channels, in, l.filter, l.filter}, in * l.filter * l.filter,
                                      l.out_channels * l.filter * l.filter, init_rng);
      bank.bias = Tensor<T>::zeros({l.out_channels}, true);
      bank.mode = l.mode;
      banks_.push_back(std::move(bank));
      in = l.out_channels;
    }
  }

  const ConvArchitecture& architecture() const { return arch_; }
  std::size_t side() const { return side_; }
  const std::vector<FilterBank<T>>& banks() const { return banks_; }

  std::vector<Tensor<T>> parameters() const {
    std::vector<Tensor<T>> p;
    for (const auto& b : banks_) {
      p.push_back(b.weight);
      p.push_back(b.bias);
    }
    return p;
  }

  Tensor<T> pre_activation(const Tensor<T>& images, const Mask& mask, const ForwardOptions& opt) const {
    if (mask.side != side_ || images.rank() != 4 || images.dim(2) != side_ || images.dim(3) != side_) {
      throw ShapeError("conv model built for " + std::to_string(side_) + "x" + std::to_string(side_) +
                       " images, got " + to_string(images.shape()));
    }
    if (images.dim(1) + 1 != arch_.input_channels) {
      throw ShapeError("conv model expects " + std::to_string(arch_.input_channels - 1) +
                       " image channels plus the mask, got " + std::to_string(images.dim(1)));
    }
    Tensor<T> h = masked_input_with_mask_channel(images, mask);
    for (std::size_t l = 0; l < banks_.size(); ++l) {
      h = conv2d(h, banks_[l]);
      if (l + 1 == banks_.size()) break;
      h = sigmoid(h);
      if (opt.training && opt.dropout > 0.0) {
        if (!opt.rng) throw std::invalid_argument("dropout requires a random stream");
        h = dropout(h, opt.dropout, *opt.rng, true);
      }
    }
    return h;
  }

 private:
  ConvArchitecture arch_;
  std::size_t side_ = 0;
  std::vector<FilterBank<T>> banks_;
};

/// Binary ConvNADE: one output map of Bernoulli probabilities.
template <typename T>
class ConvNade {
 public:
  static constexpr Likelihood likelihood = Likelihood::bernoulli;
  static constexpr ModelKind kind = ModelKind::convnade;
  using Scalar = T;

  ConvNade(ConvArchitecture arch, std::size_t side, Rng& init_rng) : stack_(check(std::move(arch)), side, init_rng) {}

  std::size_t image_channels() const { return 1; }
  std::size_t side() const { return stack_.side(); }
  const ConvStack<T>& stack() const { return stack_; }
  std::vector<Tensor<T>> parameters() const { return stack_.parameters(); }

  /// (B, 1, N, N) binary images -> (B, 1, N, N) probabilities.
  Tensor<T> forward(const Tensor<T>& images, const Mask& mask, const ForwardOptions& opt = {}) const {
    return sigmoid(stack_.pre_activation(images, mask, opt));
  }

 private:
  static ConvArchitecture check(ConvArchitecture a) {
    if (a.input_channels != 2 || a.output_channels() != 1) {
      throw std::invalid_argument("ConvNADE needs 2 input channels (pixel, mask) and 1 output channel");
    }
    return a;
  }

  ConvStack<T> stack_;
};

/// ConvNADE-Beta-Color: six softplus output maps holding (alpha, beta) for
/// red, green and blue in channel order a_r, b_r, a_g, b_g, a_b, b_b.
template <typename T>
class ConvNadeBetaColor {
 public:
  static constexpr Likelihood likelihood = Likelihood::beta;
  static constexpr ModelKind kind = ModelKind::convnade_beta_color;
  using Scalar = T;
  static constexpr double kShapeFloor = 1e-4;

  ConvNadeBetaColor(ConvArchitecture arch, std::size_t side, Rng& init_rng)
      : stack_(check(std::move(arch)), side, init_rng) {}

  std::size_t image_channels() const { return 3; }
  std::size_t side() const { return stack_.side(); }
  const ConvStack<T>& stack() const { return stack_; }
  std::vector<Tensor<T>> parameters() const { return stack_.parameters(); }

  BetaMaps<T> forward(const Tensor<T>& images, const Mask& mask, const ForwardOptions& opt = {}) const {
    const auto shapes = clamp_min(softplus(stack_.pre_activation(images, mask, opt)), static_cast<T>(kShapeFloor));
    return {select_channels(shapes, {0, 2, 4}), select_channels(shapes, {1, 3, 5})};
  }

 private:
  static ConvArchitecture check(ConvArchitecture a) {
    if (a.input_channels != 4 || a.output_channels() != 6) {
      throw std::invalid_argument("ConvNADE-Beta-Color needs 4 input channels (RGB, mask) and 6 output channels");
    }
    return a;
  }

  ConvStack<T> stack_;
};

}  // namespace convnade
