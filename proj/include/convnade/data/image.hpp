#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "convnade/numerics/tensor.hpp"

namespace convnade {

/// (channels, side, side) intensities in [0, 1], channel-major then row-major.
struct Image {
  std::size_t channels = 1;
  std::size_t side = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(std::size_t c, std::size_t n, double fill = 0.0) : channels(c), side(n), pixels(c * n * n, fill) {}
  Image(std::size_t c, std::size_t n, std::vector<double> values) : channels(c), side(n), pixels(std::move(values)) {
    if (pixels.size() != c * n * n) throw ShapeError("image: pixel count does not match shape");
  }

  std::size_t pixel_count() const { return side * side; }
  double& at(std::size_t c, std::size_t row, std::size_t col) { return pixels[(c * side + row) * side + col]; }
  double at(std::size_t c, std::size_t row, std::size_t col) const { return pixels[(c * side + row) * side + col]; }

  bool operator==(const Image&) const = default;
};

/// Stacks images into a constant (B, C, N, N) tensor.
template <typename T>
Tensor<T> to_batch(std::span<const Image* const> images) {
  if (images.empty()) throw std::invalid_argument("to_batch: empty batch");
  const auto c = images.front()->channels, n = images.front()->side;
  std::vector<T> values;
  values.reserve(images.size() * c * n * n);
  for (const Image* img : images) {
    if (img->channels != c || img->side != n) throw ShapeError("to_batch: images differ in shape");
    for (double v : img->pixels) values.push_back(static_cast<T>(v));
  }
  return Tensor<T>({images.size(), c, n, n}, std::move(values));
}

template <typename T>
Tensor<T> to_batch(const std::vector<Image>& images) {
  std::vector<const Image*> ptrs;
  for (const auto& img : images) ptrs.push_back(&img);
  return to_batch<T>(std::span<const Image* const>(ptrs));
}

}  // namespace convnade
