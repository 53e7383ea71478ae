#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "convnade/data/loaders.hpp"
#include "convnade/data/transforms.hpp"
#include "convnade/models/common.hpp"

namespace convnade {

/// `<format>:<path>[,<path>]` where format is mnist-idx (images, optional
/// labels), png-dir (directory) or fer-csv (file).
struct DatasetSpec {
  std::string format;
  std::vector<std::string> paths;
};

inline DatasetSpec parse_dataset_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon + 1 == text.size()) {
    throw std::invalid_argument("dataset spec '" + std::string(text) + "' is not <format>:<path>");
  }
  DatasetSpec spec{std::string(text.substr(0, colon)), {}};
  if (spec.format != "mnist-idx" && spec.format != "png-dir" && spec.format != "fer-csv") {
    throw std::invalid_argument("unknown dataset format '" + spec.format + "' (mnist-idx, png-dir, fer-csv)");
  }
  std::string_view rest = text.substr(colon + 1);
  for (std::size_t pos = 0; pos <= rest.size();) {
    const auto comma = rest.find(',', pos);
    const auto end = comma == std::string_view::npos ? rest.size() : comma;
    spec.paths.emplace_back(rest.substr(pos, end - pos));
    pos = end + 1;
  }
  const std::size_t max_paths = spec.format == "mnist-idx" ? 2 : 1;
  if (spec.paths.size() > max_paths) throw std::invalid_argument("dataset spec has too many paths");
  return spec;
}

inline Dataset load_dataset(const DatasetSpec& spec) {
  if (spec.format == "mnist-idx") return load_idx(spec.paths.at(0), spec.paths.size() > 1 ? spec.paths[1] : "");
  if (spec.format == "png-dir") return load_png_dir(spec.paths.at(0), 3);
  return load_csv_pixels(spec.paths.at(0));
}

/// Model-ready copy of an image. Bernoulli models get a threshold-binarized
/// gray image, nearest-resized so it stays binary. Beta models get three
/// channels (gray replicated), bilinear resize, then clamping into (0, 1).
inline Image prepare_image(const Image& img, Likelihood likelihood, std::size_t side) {
  if (likelihood == Likelihood::bernoulli) return resize(binarize(to_gray(img)), side, ResizeMethod::nearest);
  return clamp(resize(replicate_channels(img, 3), side, ResizeMethod::bilinear));
}

inline Dataset prepare(Dataset ds, Likelihood likelihood, std::size_t side) {
  for (auto& img : ds.images) img = prepare_image(img, likelihood, side);
  return ds;
}

}  // namespace convnade
