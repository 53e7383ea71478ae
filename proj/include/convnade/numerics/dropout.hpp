#pragma once

#include <cstdint>
#include <stdexcept>

#include "convnade/numerics/random.hpp"
#include "convnade/numerics/tensor.hpp"

namespace convnade {

/// Inverted dropout: in training mode each element is zeroed with
/// probability `rate` and survivors are scaled by 1/(1-rate); otherwise the
/// input is returned unchanged.
template <typename T>
Tensor<T> dropout(const Tensor<T>& t, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0) || rate >= 1.0) throw std::invalid_argument("dropout: rate must lie in [0, 1)");
  if (!training || rate == 0.0) return t;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  // two 32-bit uniforms per 64-bit draw; rate resolved to 2^-32
  const auto threshold = static_cast<std::uint64_t>(rate * 0x1.0p32);
  std::vector<T> factor(t.size());
  for (std::size_t i = 0; i < factor.size(); i += 2) {
    const std::uint64_t bits = rng.next();
    factor[i] = (bits & 0xFFFFFFFFULL) < threshold ? T(0) : keep_scale;
    if (i + 1 < factor.size()) factor[i + 1] = (bits >> 32) < threshold ? T(0) : keep_scale;
  }
  std::vector<T> out(t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = t[i] * factor[i];
  auto tn = t.node();
  return detail::make_result<T>(
      t.shape(), std::move(out),
      [tn, factor = std::move(factor)](detail::Node<T>& self) {
        tn->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) tn->grad[i] += self.grad[i] * factor[i];
      },
      t);
}

}  // namespace convnade
