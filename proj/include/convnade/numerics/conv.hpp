#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <string>
#include <string_view>
#include <utility>

#include "convnade/numerics/parallel.hpp"
#include "convnade/numerics/tensor.hpp"

namespace convnade {

/// "valid" filters complete windows only and shrinks the map by N_W - 1;
/// "full" zero-pads by N_W - 1 on every side and grows it by the same.
enum class ConvMode { valid, full };

inline std::string_view to_string(ConvMode m) { return m == ConvMode::valid ? "valid" : "full"; }

inline ConvMode parse_conv_mode(std::string_view s) {
  if (s == "valid") return ConvMode::valid;
  if (s == "full") return ConvMode::full;
  throw std::invalid_argument("unknown convolution mode '" + std::string(s) + "'");
}

inline std::size_t conv_output_extent(std::size_t in, std::size_t filter, ConvMode mode) {
  return mode == ConvMode::valid ? in - filter + 1 : in + filter - 1;
}

/// Filters (out, in, N_W, N_W) with per-output bias and a fixed mode.
template <typename T>
struct FilterBank {
  Tensor<T> weight;
  Tensor<T> bias;
  ConvMode mode = ConvMode::valid;

  std::size_t out_channels() const { return weight.dim(0); }
  std::size_t in_channels() const { return weight.dim(1); }
  std::size_t filter_size() const { return weight.dim(2); }
};

namespace detail {

struct ConvGeometry {
  std::size_t cin, h, w, k, pad, hp, wp, ho, wo;
};

// Columns x of the output whose source column x + v - pad lies inside
// [0, w).
inline std::pair<std::size_t, std::size_t> valid_columns(const ConvGeometry& g, std::size_t v) {
  const std::size_t lo = g.pad > v ? g.pad - v : 0;
  const std::size_t hi = std::min(g.wo, g.w + g.pad > v ? g.w + g.pad - v : 0);
  return {lo, std::max(lo, hi)};
}

// Unrolls one (possibly virtually zero-padded) image into a
// (cin*k*k, ho*wo) column matrix.
template <typename T>
void im2col(const T* img, const ConvGeometry& g, T* cols) {
  const std::size_t plane = g.ho * g.wo;
  for (std::size_t c = 0; c < g.cin; ++c) {
    const T* src = img + c * g.h * g.w;
    for (std::size_t u = 0; u < g.k; ++u) {
      for (std::size_t v = 0; v < g.k; ++v) {
        T* dst = cols + ((c * g.k + u) * g.k + v) * plane;
        const auto [lo, hi] = valid_columns(g, v);
        for (std::size_t y = 0; y < g.ho; ++y) {
          // padded row y+u maps to source row y+u-pad
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + u) - static_cast<std::ptrdiff_t>(g.pad);
          T* row = dst + y * g.wo;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(g.h)) {
            std::fill(row, row + g.wo, T(0));
            continue;
          }
          const T* srow = src + static_cast<std::size_t>(sy) * g.w + (lo + v - g.pad);
          std::fill(row, row + lo, T(0));
          std::copy(srow, srow + (hi - lo), row + lo);
          std::fill(row + hi, row + g.wo, T(0));
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, const ConvGeometry& g, T* img) {
  const std::size_t plane = g.ho * g.wo;
  for (std::size_t c = 0; c < g.cin; ++c) {
    T* dst = img + c * g.h * g.w;
    for (std::size_t u = 0; u < g.k; ++u) {
      for (std::size_t v = 0; v < g.k; ++v) {
        const T* src = cols + ((c * g.k + u) * g.k + v) * plane;
        const auto [lo, hi] = valid_columns(g, v);
        for (std::size_t y = 0; y < g.ho; ++y) {
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + u) - static_cast<std::ptrdiff_t>(g.pad);
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(g.h)) continue;
          T* drow = dst + static_cast<std::size_t>(sy) * g.w + (lo + v - g.pad);
          const T* srow = src + y * g.wo + lo;
          for (std::size_t x = 0; x < hi - lo; ++x) drow[x] += srow[x];
        }
      }
    }
  }
}

}  // namespace detail

/// Stride-1 2-D cross-correlation (no kernel flip) of a (B, C_in, H, W)
/// batch with a filter bank, plus bias. Images in a batch are processed
/// independently; filter gradients are reduced over the batch in image
/// order with 64-bit accumulation.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias, ConvMode mode) {
  if (input.rank() != 4) throw ShapeError("conv2d: input must be (B, C, H, W), got " + to_string(input.shape()));
  if (weight.rank() != 4 || weight.dim(2) != weight.dim(3) || weight.dim(2) == 0) {
    throw ShapeError("conv2d: filters must be (out, in, k, k), got " + to_string(weight.shape()));
  }
  if (weight.dim(1) != input.dim(1)) {
    throw ShapeError("conv2d: filter bank expects " + std::to_string(weight.dim(1)) + " input channels, got " +
                     std::to_string(input.dim(1)));
  }
  if (bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
    throw ShapeError("conv2d: bias must have " + std::to_string(weight.dim(0)) + " entries");
  }
  const std::size_t k = weight.dim(2);
  if (mode == ConvMode::valid && (k > input.dim(2) || k > input.dim(3))) {
    throw ShapeError("conv2d: valid convolution with filter " + std::to_string(k) + " larger than input " +
                     to_string(input.shape()));
  }

  detail::ConvGeometry g{};
  g.cin = input.dim(1);
  g.h = input.dim(2);
  g.w = input.dim(3);
  g.k = k;
  g.pad = mode == ConvMode::full ? k - 1 : 0;
  g.hp = g.h + 2 * g.pad;
  g.wp = g.w + 2 * g.pad;
  g.ho = g.hp - k + 1;
  g.wo = g.wp - k + 1;
  const std::size_t batch = input.dim(0);
  const std::size_t cout = weight.dim(0);
  const std::size_t patch = g.cin * k * k;
  const std::size_t plane = g.ho * g.wo;
  const std::size_t in_stride = g.cin * g.h * g.w;

  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using CMap = Eigen::Map<const Mat>;
  using Map = Eigen::Map<Mat>;

  std::vector<T> out(batch * cout * plane);
  {
    const T* x = input.vec().data();
    const T* wdata = weight.vec().data();
    const T* bdata = bias.vec().data();
    parallel_for(batch, [&](std::size_t n) {
      std::vector<T> cols(patch * plane);
      detail::im2col(x + n * in_stride, g, cols.data());
      Map y(out.data() + n * cout * plane, cout, plane);
      y.noalias() = CMap(wdata, cout, patch) * CMap(cols.data(), patch, plane);
      for (std::size_t j = 0; j < cout; ++j) y.row(j).array() += bdata[j];
    });
  }

  auto xn = input.node(), wn = weight.node(), bn = bias.node();
  return detail::make_result<T>(
      {batch, cout, g.ho, g.wo}, std::move(out),
      [xn, wn, bn, g, batch, cout, patch, plane, in_stride](detail::Node<T>& self) {
        const bool need_x = xn->requires_grad, need_w = wn->requires_grad, need_b = bn->requires_grad;
        if (need_x) xn->ensure_grad();
        std::vector<std::vector<T>> dw(need_w ? batch : 0);
        parallel_for(batch, [&](std::size_t n) {
          CMap gy(self.grad.data() + n * cout * plane, cout, plane);
          std::vector<T> cols(patch * plane);
          if (need_w) {
            detail::im2col(xn->value.data() + n * in_stride, g, cols.data());
            dw[n].resize(cout * patch);
            Map(dw[n].data(), cout, patch).noalias() = gy * CMap(cols.data(), patch, plane).transpose();
          }
          if (need_x) {
            Map(cols.data(), patch, plane).noalias() = CMap(wn->value.data(), cout, patch).transpose() * gy;
            detail::col2im_add(cols.data(), g, xn->grad.data() + n * in_stride);
          }
        });
        if (need_w) {
          std::vector<double> acc(cout * patch, 0.0);
          for (std::size_t n = 0; n < batch; ++n)
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += static_cast<double>(dw[n][i]);
          wn->ensure_grad();
          for (std::size_t i = 0; i < acc.size(); ++i) wn->grad[i] += static_cast<T>(acc[i]);
        }
        if (need_b) {
          bn->ensure_grad();
          for (std::size_t j = 0; j < cout; ++j) {
            double acc = 0.0;
            for (std::size_t n = 0; n < batch; ++n) {
              const T* row = self.grad.data() + (n * cout + j) * plane;
              for (std::size_t p = 0; p < plane; ++p) acc += static_cast<double>(row[p]);
            }
            bn->grad[j] += static_cast<T>(acc);
          }
        }
      },
      input, weight, bias);
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const FilterBank<T>& bank) {
  return conv2d(input, bank.weight, bank.bias, bank.mode);
}

}  // namespace convnade
