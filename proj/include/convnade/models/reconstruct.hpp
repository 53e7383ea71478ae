#pragma once

#include <algorithm>

#include "convnade/data/image.hpp"
#include "convnade/models/common.hpp"

namespace convnade {

enum class FillMode { mean, sample };

inline FillMode parse_fill_mode(std::string_view s) {
  if (s == "mean") return FillMode::mean;
  if (s == "sample") return FillMode::sample;
  throw std::invalid_argument("unknown fill mode '" + std::string(s) + "' (expected mean or sample)");
}

/// Fills the unobserved pixels of each image from one forward pass
/// conditioned on the patch; observed pixels are copied unchanged. Mean
/// mode uses p (Bernoulli) or alpha / (alpha + beta); sample mode draws one
/// value per pixel from `rng`.
template <typename Model>
std::vector<Image> reconstruct(const Model& model, const std::vector<Image>& images, const PixelPatch& patch,
                               FillMode mode, Rng& rng) {
  using T = typename Model::Scalar;
  if (images.empty()) return {};
  for (const auto& img : images) {
    if (img.side != model.side() || img.channels != model.image_channels()) {
      throw ShapeError("reconstruct: image shape does not match the model");
    }
  }
  const Mask mask = make_mask(patch, model.side());
  const std::size_t plane = mask.grid.size();
  NoGradGuard no_grad;
  const auto batch = to_batch<T>(images);

  std::vector<Image> out = images;
  auto fill = [&](auto&& value_at) {
    for (std::size_t n = 0; n < out.size(); ++n) {
      auto& px = out[n].pixels;
      for (std::size_t i = 0; i < px.size(); ++i) {
        if (!mask.grid[i % plane]) px[i] = std::clamp(value_at(n * px.size() + i), 0.0, 1.0);
      }
    }
  };
  if constexpr (Model::likelihood == Likelihood::beta) {
    const auto maps = model.forward(batch, mask);
    fill([&](std::size_t i) {
      const double a = maps.alpha[i], b = maps.beta[i];
      return mode == FillMode::mean ? a / (a + b) : rng.beta(a, b);
    });
  } else {
    const auto probs = model.forward(batch, mask);
    fill([&](std::size_t i) {
      const double p = probs[i];
      return mode == FillMode::mean ? p : (rng.bernoulli(p) ? 1.0 : 0.0);
    });
  }
  return out;
}

template <typename Model>
Image reconstruct(const Model& model, const Image& image, const PixelPatch& patch, FillMode mode, Rng& rng) {
  return reconstruct(model, std::vector<Image>{image}, patch, mode, rng).front();
}

}  // namespace convnade
