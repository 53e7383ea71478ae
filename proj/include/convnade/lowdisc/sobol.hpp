#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace convnade {

struct SobolPoint {
  double u1 = 0.0;
  double u2 = 0.0;
};

/// Unscrambled two-dimensional Sobol' generator with 31-bit precision.
///
/// Dimension 1 is the base-2 radical inverse. Dimension 2 uses the
/// primitive polynomial x + 1 with initial direction number m_1 = 1 (the
/// Joe-Kuo entry for the first dimension after van der Corput). Points are
/// emitted in Gray-code order, so the first four are (0,0), (1/2,1/2),
/// (3/4,1/4), (1/4,3/4). Every prefix of length 2^k is a (0,k,2)-net.
class Sobol2D {
 public:
  static constexpr unsigned kBits = 31;
  static constexpr std::uint64_t kMaxPoints = std::uint64_t{1} << kBits;

  Sobol2D() {
    std::uint32_t m = 1;
    for (unsigned j = 0; j < kBits; ++j) {
      dir1_[j] = std::uint32_t{1} << (kBits - 1 - j);
      if (j > 0) m = (m << 1) ^ m;  // m_j = 2 m_{j-1} xor m_{j-1}
      dir2_[j] = m << (kBits - 1 - j);
    }
  }

  /// Integer coordinates (numerators over 2^31) of point n (0-based).
  std::array<std::uint32_t, 2> integer_point(std::uint64_t n) const {
    if (n >= kMaxPoints) throw std::out_of_range("sobol: index beyond 2^31");
    const std::uint64_t gray = n ^ (n >> 1);
    std::uint32_t x = 0, y = 0;
    for (unsigned j = 0; j < kBits; ++j) {
      if ((gray >> j) & 1U) {
        x ^= dir1_[j];
        y ^= dir2_[j];
      }
    }
    return {x, y};
  }

  SobolPoint point(std::uint64_t n) const {
    const auto [x, y] = integer_point(n);
    constexpr double scale = 1.0 / static_cast<double>(kMaxPoints);
    return {x * scale, y * scale};
  }

 private:
  std::array<std::uint32_t, kBits> dir1_{};
  std::array<std::uint32_t, kBits> dir2_{};
};

/// First n points of the sequence, starting at the origin.
inline std::vector<SobolPoint> sobol2d(std::uint64_t n) {
  if (n > Sobol2D::kMaxPoints) throw std::out_of_range("sobol2d: at most 2^31 points");
  const Sobol2D gen;
  std::vector<SobolPoint> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) pts.push_back(gen.point(i));
  return pts;
}

}  // namespace convnade
