#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "convnade/lowdisc/patch.hpp"
#include "convnade/numerics/random.hpp"
#include "convnade/numerics/tensor.hpp"

namespace convnade {

enum class ModelKind { nade, deepnade, convnade, convnade_beta_color };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::nade: return "nade";
    case ModelKind::deepnade: return "deepnade";
    case ModelKind::convnade: return "convnade";
    case ModelKind::convnade_beta_color: return "convnade-beta-color";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "nade") return ModelKind::nade;
  if (s == "deepnade") return ModelKind::deepnade;
  if (s == "convnade") return ModelKind::convnade;
  if (s == "convnade-beta-color") return ModelKind::convnade_beta_color;
  throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

enum class Likelihood { bernoulli, beta };

struct ForwardOptions {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;
};

template <typename T>
struct BetaMaps {
  Tensor<T> alpha;  // (B, 3, N, N)
  Tensor<T> beta;   // (B, 3, N, N)
};

/// Uniform(-r, r) with r = sqrt(6 / (fan_in + fan_out)).
template <typename T>
Tensor<T> glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<T> v(numel(shape));
  for (auto& x : v) x = static_cast<T>((2.0 * rng.uniform() - 1.0) * r);
  return Tensor<T>(std::move(shape), std::move(v), true);
}

/// Network input x * mask followed by the mask as an extra channel:
/// (B, C, N, N) -> (B, C + 1, N, N).
template <typename T>
Tensor<T> masked_input_with_mask_channel(const Tensor<T>& images, const Mask& mask) {
  if (images.rank() != 4 || images.dim(2) != mask.side || images.dim(3) != mask.side) {
    throw ShapeError("masked input: images " + to_string(images.shape()) + " do not match a " +
                     std::to_string(mask.side) + "x" + std::to_string(mask.side) + " mask");
  }
  const std::size_t batch = images.dim(0), c = images.dim(1), plane = mask.side * mask.side;
  std::vector<T> v;
  v.reserve(batch * (c + 1) * plane);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T* src = images.vec().data() + (n * c + ch) * plane;
      for (std::size_t p = 0; p < plane; ++p) v.push_back(mask.grid[p] ? src[p] : T(0));
    }
    for (std::size_t p = 0; p < plane; ++p) v.push_back(static_cast<T>(mask.grid[p]));
  }
  return Tensor<T>({batch, c + 1, mask.side, mask.side}, std::move(v));
}

/// (B, 1, N, N) images times mask, flattened to (B, N*N).
template <typename T>
Tensor<T> masked_flat_input(const Tensor<T>& images, const Mask& mask) {
  if (images.rank() != 4 || images.dim(1) != 1 || images.dim(2) != mask.side || images.dim(3) != mask.side) {
    throw ShapeError("masked input: expected (B, 1, " + std::to_string(mask.side) + ", " +
                     std::to_string(mask.side) + "), got " + to_string(images.shape()));
  }
  const std::size_t batch = images.dim(0), plane = mask.side * mask.side;
  std::vector<T> v(batch * plane);
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t p = 0; p < plane; ++p) v[n * plane + p] = mask.grid[p] ? images.vec()[n * plane + p] : T(0);
  return Tensor<T>({batch, plane}, std::move(v));
}

}  // namespace convnade
