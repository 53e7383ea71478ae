#pragma once

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "convnade/data/dataset.hpp"

namespace convnade {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off, const std::string& path) {
  if (off + 4 > b.size()) {
    throw FormatError(path + ": header truncated at byte offset " + std::to_string(b.size()) + " (need " +
                      std::to_string(off + 4) + " bytes)");
  }
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
         std::uint32_t{b[off + 3]};
}

}  // namespace detail

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// IDX image file (big-endian magic 0x00000803, count, rows, cols, then one
/// byte per pixel); bytes map to value / 255. An optional label file
/// (magic 0x00000801) must list the same number of items.
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path = {}) {
  const auto bytes = detail::read_bytes(images_path);
  const std::uint32_t magic = detail::read_be32(bytes, 0, images_path);
  if (magic != kIdxImageMagic) {
    std::ostringstream msg;
    msg << images_path << ": bad magic 0x" << std::hex << magic << " at byte offset 0 (expected 0x00000803)";
    throw FormatError(msg.str());
  }
  const std::size_t count = detail::read_be32(bytes, 4, images_path);
  const std::size_t rows = detail::read_be32(bytes, 8, images_path);
  const std::size_t cols = detail::read_be32(bytes, 12, images_path);
  if (rows != cols) throw FormatError(images_path + ": images are not square");
  const std::size_t expected = 16 + count * rows * cols;
  if (bytes.size() < expected) {
    throw FormatError(images_path + ": truncated payload, expected " + std::to_string(expected) + " bytes but got " +
                      std::to_string(bytes.size()) + " (data ends at byte offset " + std::to_string(bytes.size()) +
                      ")");
  }
  Dataset ds;
  ds.source = "idx:" + images_path;
  ds.images.reserve(count);
  const std::size_t plane = rows * cols;
  for (std::size_t n = 0; n < count; ++n) {
    Image img(1, rows);
    for (std::size_t p = 0; p < plane; ++p) img.pixels[p] = bytes[16 + n * plane + p] / 255.0;
    ds.images.push_back(std::move(img));
  }
  if (!labels_path.empty()) {
    const auto lb = detail::read_bytes(labels_path);
    const std::uint32_t lmagic = detail::read_be32(lb, 0, labels_path);
    if (lmagic != kIdxLabelMagic) throw FormatError(labels_path + ": bad label magic at byte offset 0");
    const std::size_t lcount = detail::read_be32(lb, 4, labels_path);
    if (lcount != count) throw FormatError(labels_path + ": label count differs from image count");
    if (lb.size() < 8 + lcount) {
      throw FormatError(labels_path + ": truncated payload, expected " + std::to_string(8 + lcount) +
                        " bytes but got " + std::to_string(lb.size()));
    }
    ds.labels.assign(lb.begin() + 8, lb.begin() + 8 + static_cast<std::ptrdiff_t>(lcount));
  }
  return ds;
}

/// Writes 8-bit IDX images (values rounded from [0, 1]).
inline void write_idx(const std::string& path, const std::vector<Image>& images) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::size_t side = images.empty() ? 0 : images.front().side;
  auto be32 = [&](std::uint32_t v) {
    const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
    os.write(b, 4);
  };
  be32(kIdxImageMagic);
  be32(static_cast<std::uint32_t>(images.size()));
  be32(static_cast<std::uint32_t>(side));
  be32(static_cast<std::uint32_t>(side));
  for (const auto& img : images)
    for (std::size_t p = 0; p < side * side; ++p) os.put(static_cast<char>(std::lround(img.pixels[p] * 255.0)));
}

/// Reads one 8-bit PNG as `channels` (1 = gray, 3 = RGB) channels.
inline Image load_png(const std::string& path, std::size_t channels = 3) {
  if (channels != 1 && channels != 3) throw std::invalid_argument("load_png: channels must be 1 or 3");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw FormatError(path + ": " + image.message);
  }
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError(path + ": " + image.message);
  }
  if (image.width != image.height) throw FormatError(path + ": image is not square");
  const std::size_t n = image.width;
  Image img(channels, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t c = 0; c < channels; ++c) img.at(c, r, q) = buf[(r * n + q) * channels + c] / 255.0;
  return img;
}

/// All *.png files of a directory in lexicographic order.
inline Dataset load_png_dir(const std::string& dir, std::size_t channels = 3) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  Dataset ds;
  ds.source = "png-dir:" + dir;
  for (const auto& f : files) {
    ds.images.push_back(load_png(f.string(), channels));
    if (ds.images.back().side != ds.images.front().side) {
      throw FormatError(f.string() + ": dimensions differ from the first image; resize the source first");
    }
  }
  return ds;
}

/// FER2013-style CSV: header `emotion,pixels,Usage`, then rows whose pixel
/// field holds side*side space-separated bytes. Usage Training /
/// PublicTest / PrivateTest becomes the canonical train / validation / test
/// split.
inline Dataset load_csv_pixels(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  Dataset ds;
  ds.source = "csv:" + path;
  std::string line;
  std::getline(is, line);
  if (line.find("pixels") == std::string::npos) throw FormatError(path + ": missing `emotion,pixels,Usage` header");
  bool all_tagged = true;
  std::vector<SplitTag> tags;
  for (std::size_t row = 2; std::getline(is, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos) throw FormatError(path + ": row " + std::to_string(row) + " has no pixel field");
    std::istringstream px(line.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
    std::vector<double> values;
    for (int v; px >> v;) values.push_back(v / 255.0);
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(values.size()))));
    if (values.empty() || side * side != values.size()) {
      throw FormatError(path + ": row " + std::to_string(row) + " has " + std::to_string(values.size()) +
                        " pixels, not a square count");
    }
    if (!ds.images.empty() && side != ds.images.front().side) {
      throw FormatError(path + ": row " + std::to_string(row) + " differs in size from the first row");
    }
    ds.images.emplace_back(1, side, std::move(values));
    ds.labels.push_back(std::stoi(line.substr(0, c1)));
    const std::string usage = c2 == std::string::npos ? "" : line.substr(c2 + 1);
    if (usage == "Training") tags.push_back(SplitTag::train);
    else if (usage == "PublicTest") tags.push_back(SplitTag::validation);
    else if (usage == "PrivateTest") tags.push_back(SplitTag::test);
    else all_tagged = false;
  }
  if (all_tagged) ds.tags = std::move(tags);
  return ds;
}

}  // namespace convnade
