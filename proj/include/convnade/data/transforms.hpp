#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "convnade/data/image.hpp"

namespace convnade {

enum class ResizeMethod { bilinear, nearest };

/// Square resize with pixel-centre alignment: destination pixel i samples
/// source coordinate (i + 0.5) * n_src / n_dst - 0.5, clamped to the grid.
/// No anti-alias prefilter is applied when shrinking.
inline Image resize(const Image& img, std::size_t target, ResizeMethod method = ResizeMethod::bilinear) {
  if (img.pixels.size() != img.channels * img.side * img.side) {
    throw ShapeError("resize: source image is not square");
  }
  if (target == 0) throw std::invalid_argument("resize: zero target size");
  if (target == img.side) return img;
  const double scale = static_cast<double>(img.side) / static_cast<double>(target);
  const double last = static_cast<double>(img.side - 1);
  Image out(img.channels, target);
  for (std::size_t c = 0; c < img.channels; ++c) {
    for (std::size_t r = 0; r < target; ++r) {
      for (std::size_t q = 0; q < target; ++q) {
        if (method == ResizeMethod::nearest) {
          const auto sr = std::min(img.side - 1, static_cast<std::size_t>((r + 0.5) * scale));
          const auto sq = std::min(img.side - 1, static_cast<std::size_t>((q + 0.5) * scale));
          out.at(c, r, q) = img.at(c, sr, sq);
          continue;
        }
        const double y = std::clamp((r + 0.5) * scale - 0.5, 0.0, last);
        const double x = std::clamp((q + 0.5) * scale - 0.5, 0.0, last);
        const auto y0 = static_cast<std::size_t>(y), x0 = static_cast<std::size_t>(x);
        const std::size_t y1 = std::min(y0 + 1, img.side - 1), x1 = std::min(x0 + 1, img.side - 1);
        const double fy = y - y0, fx = x - x0;
        out.at(c, r, q) = (1 - fy) * ((1 - fx) * img.at(c, y0, x0) + fx * img.at(c, y0, x1)) +
                          fy * ((1 - fx) * img.at(c, y1, x0) + fx * img.at(c, y1, x1));
      }
    }
  }
  return out;
}

/// 1 where value >= threshold, else 0.
inline Image binarize(Image img, double threshold = 0.5) {
  for (auto& v : img.pixels) v = v >= threshold ? 1.0 : 0.0;
  return img;
}

/// Confines values to [eps, 1 - eps] so the Beta density is finite.
inline Image clamp(Image img, double eps = 1e-3) {
  for (auto& v : img.pixels) v = std::clamp(v, eps, 1.0 - eps);
  return img;
}

/// Repeats a single-channel image `channels` times.
inline Image replicate_channels(const Image& img, std::size_t channels) {
  if (img.channels == channels) return img;
  if (img.channels != 1) throw ShapeError("replicate_channels: source must have one channel");
  Image out(channels, img.side);
  const std::size_t plane = img.side * img.side;
  for (std::size_t c = 0; c < channels; ++c) std::copy_n(img.pixels.begin(), plane, out.pixels.begin() + c * plane);
  return out;
}

/// Channel mean.
inline Image to_gray(const Image& img) {
  if (img.channels == 1) return img;
  Image out(1, img.side);
  const std::size_t plane = img.side * img.side;
  for (std::size_t i = 0; i < plane; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < img.channels; ++c) sum += img.pixels[c * plane + i];
    out.pixels[i] = sum / static_cast<double>(img.channels);
  }
  return out;
}

}  // namespace convnade
