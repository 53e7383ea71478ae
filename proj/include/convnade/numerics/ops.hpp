#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "convnade/numerics/special.hpp"
#include "convnade/numerics/tensor.hpp"

namespace convnade {

namespace detail {

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
}

template <typename T, typename F, typename D>
Tensor<T> unary(const Tensor<T>& a, F f, D dfdx_from_y) {
  std::vector<T> out(a.size());
  const auto& x = a.vec();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
  auto an = a.node();
  return make_result<T>(
      a.shape(), std::move(out),
      [an, dfdx_from_y](Node<T>& self) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          an->grad[i] += self.grad[i] * dfdx_from_y(an->value[i], self.value[i]);
        }
      },
      a);
}

}  // namespace detail

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape(a, b, "add");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  auto an = a.node(), bn = b.node();
  return detail::make_result<T>(
      a.shape(), std::move(out),
      [an, bn](detail::Node<T>& self) {
        for (auto* in : {an.get(), bn.get()}) {
          if (!in->requires_grad) continue;
          in->ensure_grad();
          for (std::size_t i = 0; i < self.grad.size(); ++i) in->grad[i] += self.grad[i];
        }
      },
      a, b);
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape(a, b, "mul");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  auto an = a.node(), bn = b.node();
  return detail::make_result<T>(
      a.shape(), std::move(out),
      [an, bn](detail::Node<T>& self) {
        if (an->requires_grad) {
          an->ensure_grad();
          for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i] * bn->value[i];
        }
        if (bn->requires_grad) {
          bn->ensure_grad();
          for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i] += self.grad[i] * an->value[i];
        }
      },
      a, b);
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) {
  return detail::unary(a, [s](T x) { return x * s; }, [s](T, T) { return s; });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = 0;
  for (T v : a.values()) total += v;
  auto an = a.node();
  return detail::make_result<T>(
      {1}, {total},
      [an](detail::Node<T>& self) {
        an->ensure_grad();
        for (auto& g : an->grad) g += self.grad[0];
      },
      a);
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  using Arr = Eigen::Array<T, Eigen::Dynamic, 1>;
  const auto x = Eigen::Map<const Arr>(a.vec().data(), static_cast<Eigen::Index>(a.size()));
  std::vector<T> out(a.size());
  // e = exp(-|x|) never overflows; pick the branch-free symmetric form
  const Arr e = (-x.abs()).exp();
  Eigen::Map<Arr>(out.data(), static_cast<Eigen::Index>(out.size())) =
      (x >= T(0)).select(T(1) / (T(1) + e), e / (T(1) + e));
  auto an = a.node();
  return detail::make_result<T>(
      a.shape(), std::move(out),
      [an](detail::Node<T>& self) {
        an->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          const T y = self.value[i];
          an->grad[i] += self.grad[i] * y * (T(1) - y);
        }
      },
      a);
}

template <typename T>
Tensor<T> softplus(const Tensor<T>& a) {
  return detail::unary(a, [](T x) { return softplus(x); }, [](T x, T) { return sigmoid(x); });
}

/// max(x, floor); the gradient is zero where the floor is active.
template <typename T>
Tensor<T> clamp_min(const Tensor<T>& a, T floor) {
  return detail::unary(
      a, [floor](T x) { return std::max(x, floor); }, [floor](T x, T) { return x > floor ? T(1) : T(0); });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (numel(shape) != a.size()) {
    throw ShapeError("reshape: cannot view " + to_string(a.shape()) + " as " + to_string(shape));
  }
  auto an = a.node();
  return detail::make_result<T>(
      std::move(shape), a.vec(),
      [an](detail::Node<T>& self) {
        an->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
      },
      a);
}

/// Concatenates two (B, C, H, W) tensors along the channel axis.
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 4 || b.rank() != 4 || a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3)) {
    throw ShapeError("concat_channels: incompatible " + to_string(a.shape()) + " and " + to_string(b.shape()));
  }
  const std::size_t batch = a.dim(0), plane = a.dim(2) * a.dim(3);
  const std::size_t ca = a.dim(1) * plane, cb = b.dim(1) * plane;
  std::vector<T> out;
  out.reserve(a.size() + b.size());
  for (std::size_t n = 0; n < batch; ++n) {
    out.insert(out.end(), a.vec().begin() + n * ca, a.vec().begin() + (n + 1) * ca);
    out.insert(out.end(), b.vec().begin() + n * cb, b.vec().begin() + (n + 1) * cb);
  }
  auto an = a.node(), bn = b.node();
  return detail::make_result<T>(
      {batch, a.dim(1) + b.dim(1), a.dim(2), a.dim(3)}, std::move(out),
      [an, bn, batch, ca, cb](detail::Node<T>& self) {
        if (an->requires_grad) an->ensure_grad();
        if (bn->requires_grad) bn->ensure_grad();
        for (std::size_t n = 0; n < batch; ++n) {
          const T* g = self.grad.data() + n * (ca + cb);
          if (an->requires_grad)
            for (std::size_t i = 0; i < ca; ++i) an->grad[n * ca + i] += g[i];
          if (bn->requires_grad)
            for (std::size_t i = 0; i < cb; ++i) bn->grad[n * cb + i] += g[ca + i];
        }
      },
      a, b);
}

/// Picks channels of a (B, C, H, W) tensor in the given order.
template <typename T>
Tensor<T> select_channels(const Tensor<T>& a, const std::vector<std::size_t>& channels) {
  if (a.rank() != 4) throw ShapeError("select_channels: expected (B, C, H, W), got " + to_string(a.shape()));
  for (auto c : channels)
    if (c >= a.dim(1)) throw ShapeError("select_channels: channel " + std::to_string(c) + " out of range");
  const std::size_t batch = a.dim(0), cin = a.dim(1), plane = a.dim(2) * a.dim(3), cout = channels.size();
  std::vector<T> out(batch * cout * plane);
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t j = 0; j < cout; ++j)
      std::copy_n(a.vec().begin() + (n * cin + channels[j]) * plane, plane, out.begin() + (n * cout + j) * plane);
  auto an = a.node();
  return detail::make_result<T>(
      {batch, cout, a.dim(2), a.dim(3)}, std::move(out),
      [an, channels, batch, cin, cout, plane](detail::Node<T>& self) {
        an->ensure_grad();
        for (std::size_t n = 0; n < batch; ++n)
          for (std::size_t j = 0; j < cout; ++j) {
            T* dst = an->grad.data() + (n * cin + channels[j]) * plane;
            const T* src = self.grad.data() + (n * cout + j) * plane;
            for (std::size_t p = 0; p < plane; ++p) dst[p] += src[p];
          }
      },
      a);
}

/// Dense layer: x (B, In), weight (Out, In), bias (Out) -> (B, Out).
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (x.rank() != 2 || weight.rank() != 2 || bias.rank() != 1 || weight.dim(1) != x.dim(1) ||
      bias.dim(0) != weight.dim(0)) {
    throw ShapeError("linear: incompatible " + to_string(x.shape()) + ", " + to_string(weight.shape()) + ", " +
                     to_string(bias.shape()));
  }
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using CMap = Eigen::Map<const Mat>;
  using Map = Eigen::Map<Mat>;
  const auto batch = static_cast<Eigen::Index>(x.dim(0));
  const auto in = static_cast<Eigen::Index>(x.dim(1));
  const auto out_dim = static_cast<Eigen::Index>(weight.dim(0));

  std::vector<T> out(static_cast<std::size_t>(batch * out_dim));
  Map y(out.data(), batch, out_dim);
  y.noalias() = CMap(x.vec().data(), batch, in) * CMap(weight.vec().data(), out_dim, in).transpose();
  y.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias.vec().data(), out_dim);

  auto xn = x.node(), wn = weight.node(), bn = bias.node();
  return detail::make_result<T>(
      {x.dim(0), weight.dim(0)}, std::move(out),
      [xn, wn, bn, batch, in, out_dim](detail::Node<T>& self) {
        CMap gy(self.grad.data(), batch, out_dim);
        if (xn->requires_grad) {
          xn->ensure_grad();
          Map(xn->grad.data(), batch, in).noalias() += gy * CMap(wn->value.data(), out_dim, in);
        }
        if (wn->requires_grad) {
          wn->ensure_grad();
          Map(wn->grad.data(), out_dim, in).noalias() += gy.transpose() * CMap(xn->value.data(), batch, in);
        }
        if (bn->requires_grad) {
          bn->ensure_grad();
          for (Eigen::Index r = 0; r < batch; ++r)
            for (Eigen::Index c = 0; c < out_dim; ++c) bn->grad[c] += gy(r, c);
        }
      },
      x, weight, bias);
}

}  // namespace convnade
