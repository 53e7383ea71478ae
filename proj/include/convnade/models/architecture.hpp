#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "convnade/numerics/conv.hpp"

namespace convnade {

struct LayerSpec {
  std::size_t out_channels = 0;
  std::size_t filter = 0;
  ConvMode mode = ConvMode::valid;

  bool operator==(const LayerSpec&) const = default;
};

/// Layer stack for the convolutional estimators. The first ceil(L/2) layers
/// are valid convolutions and the rest are full convolutions, so the output
/// extent equals the input extent.
struct ConvArchitecture {
  std::size_t input_channels = 0;
  std::vector<LayerSpec> layers;

  bool operator==(const ConvArchitecture&) const = default;

  std::size_t output_channels() const { return layers.empty() ? 0 : layers.back().out_channels; }

  /// Builds a stack from widths and filter sizes, assigning modes by the
  /// valid-then-full split.
  static ConvArchitecture from_widths(std::size_t input_channels, const std::vector<std::size_t>& widths,
                                      const std::vector<std::size_t>& filters) {
    if (widths.size() != filters.size() || widths.empty()) {
      throw std::invalid_argument("architecture: widths and filter sizes must be non-empty and equally long");
    }
    ConvArchitecture a;
    a.input_channels = input_channels;
    const std::size_t n_valid = (widths.size() + 1) / 2;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      a.layers.push_back({widths[i], filters[i], i < n_valid ? ConvMode::valid : ConvMode::full});
    }
    return a;
  }

  /// Eight layers, 32-32-64-64-64-32-32 hidden maps, filters 5,5,3,3 valid
  /// then 3,3,5,5 full.
  static ConvArchitecture default_beta_color() {
    return from_widths(4, {32, 32, 64, 64, 64, 32, 32, 6}, {5, 5, 3, 3, 3, 3, 5, 5});
  }

  static ConvArchitecture default_convnade() {
    return from_widths(2, {32, 32, 64, 64, 64, 32, 32, 1}, {5, 5, 3, 3, 3, 3, 5, 5});
  }

  /// Same depth and filter layout with 16 maps per hidden layer; sized for
  /// single-core desk runs.
  static ConvArchitecture compact(std::size_t input_channels, std::size_t output_channels) {
    return from_widths(input_channels, {16, 16, 16, 16, 16, 16, 16, output_channels}, {5, 5, 3, 3, 3, 3, 5, 5});
  }

  /// Throws unless the stack is well formed for side x side inputs.
  void validate(std::size_t side) const {
    if (layers.empty()) throw std::invalid_argument("architecture: no layers");
    if (input_channels == 0) throw std::invalid_argument("architecture: zero input channels");
    const std::size_t n_valid = (layers.size() + 1) / 2;
    std::size_t extent = side;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      if (l.out_channels == 0 || l.filter == 0) {
        throw std::invalid_argument("architecture: layer " + std::to_string(i + 1) + " has zero width or filter");
      }
      const ConvMode expected = i < n_valid ? ConvMode::valid : ConvMode::full;
      if (l.mode != expected) {
        throw std::invalid_argument("architecture: layer " + std::to_string(i + 1) + " must be a " +
                                    std::string(to_string(expected)) + " convolution");
      }
      if (l.mode == ConvMode::valid && l.filter > extent) {
        throw std::invalid_argument("architecture: layer " + std::to_string(i + 1) + " filter " +
                                    std::to_string(l.filter) + " exceeds map extent " + std::to_string(extent));
      }
      extent = conv_output_extent(extent, l.filter, l.mode);
    }
    if (extent != side) {
      throw std::invalid_argument("architecture: output extent " + std::to_string(extent) +
                                  " differs from input extent " + std::to_string(side));
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = 0, in = input_channels;
    for (const auto& l : layers) {
      n += l.out_channels * in * l.filter * l.filter + l.out_channels;
      in = l.out_channels;
    }
    return n;
  }
};

inline void to_json(nlohmann::json& j, const LayerSpec& l) {
  j = {{"out_channels", l.out_channels}, {"filter", l.filter}, {"mode", std::string(to_string(l.mode))}};
}

inline void from_json(const nlohmann::json& j, LayerSpec& l) {
  l.out_channels = j.at("out_channels").get<std::size_t>();
  l.filter = j.at("filter").get<std::size_t>();
  l.mode = parse_conv_mode(j.at("mode").get<std::string>());
}

inline void to_json(nlohmann::json& j, const ConvArchitecture& a) {
  j = {{"input_channels", a.input_channels}, {"layers", a.layers}};
}

inline void from_json(const nlohmann::json& j, ConvArchitecture& a) {
  a.input_channels = j.at("input_channels").get<std::size_t>();
  a.layers = j.at("layers").get<std::vector<LayerSpec>>();
}

}  // namespace convnade
