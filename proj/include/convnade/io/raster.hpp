#pragma once

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "convnade/data/image.hpp"
#include "convnade/lowdisc/patch.hpp"

namespace convnade {

/// Rectangular 8-bit picture, interleaved channels, row-major.
struct Raster {
  std::size_t width = 0, height = 0, channels = 1;
  std::vector<std::uint8_t> bytes;

  Raster() = default;
  Raster(std::size_t w, std::size_t h, std::size_t c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c), bytes(w * h * c, fill) {}

  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c) { return bytes[(y * width + x) * channels + c]; }
};

inline std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

/// Copies an image into the raster at (x0, y0); gray images fill every
/// raster channel.
inline void blit(Raster& r, const Image& img, std::size_t x0, std::size_t y0) {
  for (std::size_t y = 0; y < img.side; ++y)
    for (std::size_t x = 0; x < img.side; ++x)
      for (std::size_t c = 0; c < r.channels; ++c)
        r.at(x0 + x, y0 + y, c) = to_byte(img.at(img.channels == 1 ? 0 : c, y, x));
}

/// original | masked input | reconstruction, separated by one-pixel gaps.
/// Unobserved pixels of the middle panel are black.
inline Raster side_by_side(const Image& original, const Image& reconstruction, const Mask& mask) {
  const std::size_t n = original.side;
  Raster r(3 * n + 2, n, original.channels == 1 ? 1 : 3, 255);
  Image masked = original;
  const std::size_t plane = n * n;
  for (std::size_t i = 0; i < masked.pixels.size(); ++i)
    if (!mask.grid[i % plane]) masked.pixels[i] = 0.0;
  blit(r, original, 0, 0);
  blit(r, masked, n + 1, 0);
  blit(r, reconstruction, 2 * n + 2, 0);
  return r;
}

/// Binary PGM (P5).
inline void write_pgm(const std::string& path, const Raster& r) {
  if (r.channels != 1) throw std::invalid_argument("write_pgm: raster must have one channel");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "P5\n" << r.width << ' ' << r.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
}

inline void write_png(const std::string& path, const Raster& r) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(r.width);
  image.height = static_cast<png_uint_32>(r.height);
  image.format = r.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, r.bytes.data(), 0, nullptr)) {
    throw std::runtime_error(path + ": " + image.message);
  }
}

/// Patch visualisation: observed pixels white on black.
inline Raster mask_raster(const Mask& mask) {
  Raster r(mask.side, mask.side, 1);
  for (std::size_t i = 0; i < mask.grid.size(); ++i) r.bytes[i] = mask.grid[i] ? 255 : 0;
  return r;
}

}  // namespace convnade
