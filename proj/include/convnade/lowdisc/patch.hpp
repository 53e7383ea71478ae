#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "convnade/lowdisc/sobol.hpp"
#include "convnade/numerics/random.hpp"

namespace convnade {

enum class PatchKind { random, low_discrepancy };

inline std::string_view to_string(PatchKind k) { return k == PatchKind::random ? "random" : "ld"; }

inline PatchKind parse_patch_kind(std::string_view s) {
  if (s == "random") return PatchKind::random;
  if (s == "ld") return PatchKind::low_discrepancy;
  throw std::invalid_argument("unknown patch kind '" + std::string(s) + "' (expected random or ld)");
}

/// Observed pixel set. Indices are 1-based, row-major from the top-left
/// pixel, kept in generation order.
struct PixelPatch {
  PatchKind kind = PatchKind::random;
  std::vector<std::size_t> indices;
  std::size_t pixel_count = 0;  // D
  std::uint64_t seed = 0;       // random patches
  int m = -1;                   // low-discrepancy: image side 2^m
  int k = -1;                   // low-discrepancy: 2^k points

  std::size_t size() const { return indices.size(); }

  std::vector<std::size_t> sorted() const {
    auto s = indices;
    std::sort(s.begin(), s.end());
    return s;
  }
};

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline int log2_exact(std::size_t v) {
  if (!is_power_of_two(v)) throw std::invalid_argument(std::to_string(v) + " is not a power of two");
  int e = 0;
  while ((std::size_t{1} << e) != v) ++e;
  return e;
}

/// Low-discrepancy patch of 2^k pixels on a 2^m x 2^m grid: Sobol' point
/// (u1, u2) lands in column floor(2^m u1) and row 2^m - 1 - floor(2^m u2),
/// so u2 grows upward from the bottom row.
inline PixelPatch ld_patch(int m, int k) {
  if (m < 0 || m > 15) throw std::invalid_argument("ld_patch: grid exponent m must lie in [0, 15]");
  if (k < 0 || k > 2 * m) {
    throw std::invalid_argument("ld_patch: size exponent k=" + std::to_string(k) + " exceeds 2m=" +
                                std::to_string(2 * m));
  }
  const Sobol2D gen;
  const std::uint32_t side = std::uint32_t{1} << m;
  const unsigned shift = Sobol2D::kBits - static_cast<unsigned>(m);
  PixelPatch p;
  p.kind = PatchKind::low_discrepancy;
  p.pixel_count = std::size_t{side} * side;
  p.m = m;
  p.k = k;
  const std::size_t count = std::size_t{1} << k;
  p.indices.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const auto [x, y] = gen.integer_point(n);
    // floor(2^m * u) is the top m bits of the 31-bit numerator
    const std::size_t col = x >> shift;
    const std::size_t row_from_bottom = y >> shift;
    p.indices.push_back(col + side * (side - 1 - row_from_bottom) + 1);
  }
  return p;
}

/// P distinct indices drawn uniformly without replacement from {1..D}.
inline PixelPatch random_patch(std::size_t pixel_count, std::size_t size, std::uint64_t seed) {
  if (size < 1 || size > pixel_count) {
    throw std::invalid_argument("random_patch: size " + std::to_string(size) + " not in [1, " +
                                std::to_string(pixel_count) + "]");
  }
  std::vector<std::size_t> pool(pixel_count);
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  Rng rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pixel_count - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  PixelPatch p;
  p.kind = PatchKind::random;
  p.indices = std::move(pool);
  p.pixel_count = pixel_count;
  p.seed = seed;
  return p;
}

/// Binary N x N observation grid.
struct Mask {
  std::size_t side = 0;
  std::vector<std::uint8_t> grid;

  bool at(std::size_t row, std::size_t col) const { return grid[row * side + col] != 0; }
  std::size_t ones() const { return static_cast<std::size_t>(std::count(grid.begin(), grid.end(), 1)); }
};

inline Mask make_mask(const PixelPatch& patch, std::size_t side) {
  Mask mask{side, std::vector<std::uint8_t>(side * side, 0)};
  for (std::size_t idx : patch.indices) {
    if (idx < 1 || idx > side * side) {
      throw std::out_of_range("make_mask: index " + std::to_string(idx) + " outside a " + std::to_string(side) +
                              "x" + std::to_string(side) + " grid");
    }
    mask.grid[idx - 1] = 1;
  }
  return mask;
}

/// Every pixel observed.
inline PixelPatch full_patch(std::size_t pixel_count) {
  PixelPatch p;
  p.indices.resize(pixel_count);
  std::iota(p.indices.begin(), p.indices.end(), std::size_t{1});
  p.pixel_count = pixel_count;
  return p;
}

}  // namespace convnade
