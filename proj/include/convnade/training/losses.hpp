#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "convnade/lowdisc/patch.hpp"
#include "convnade/models/common.hpp"
#include "convnade/numerics/special.hpp"

namespace convnade {

namespace detail {

inline std::size_t unobserved_count(const Mask& mask) {
  const std::size_t d = mask.grid.size(), p = mask.ones();
  if (p >= d) throw std::invalid_argument("patch loss: every pixel is observed");
  return d - p;
}

template <typename T>
void check_maps(const Tensor<T>& maps, const Tensor<T>& targets, const Mask& mask, const char* what) {
  if (maps.shape() != targets.shape() || maps.rank() != 4 || maps.dim(2) != mask.side || maps.dim(3) != mask.side) {
    throw ShapeError(std::string(what) + ": shapes " + to_string(maps.shape()) + " and " +
                     to_string(targets.shape()) + " do not match the mask");
  }
}

}  // namespace detail

/// Mean negative Bernoulli log-mass over unobserved pixels:
/// -1/(m (D-P)) sum_i sum_{j not in S} [x ln p + (1-x) ln(1-p)].
/// Probabilities are kept a machine epsilon away from 0 and 1.
template <typename T>
Tensor<T> bernoulli_patch_loss(const Tensor<T>& probs, const Tensor<T>& targets, const Mask& mask) {
  detail::check_maps(probs, targets, mask, "bernoulli_patch_loss");
  const std::size_t batch = probs.dim(0), channels = probs.dim(1), plane = mask.grid.size();
  const double norm = 1.0 / static_cast<double>(batch * channels * detail::unobserved_count(mask));
  const double eps = std::numeric_limits<T>::epsilon();
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (mask.grid[i % plane]) continue;
    const double p = std::clamp(static_cast<double>(probs[i]), eps, 1.0 - eps);
    const double x = targets[i];
    total += x * std::log(p) + (1.0 - x) * std::log1p(-p);
  }
  auto pn = probs.node(), tn = targets.node();
  return detail::make_result<T>(
      {1}, {static_cast<T>(-total * norm)},
      [pn, tn, mask, norm, eps, plane](detail::Node<T>& self) {
        pn->ensure_grad();
        const double g = static_cast<double>(self.grad[0]) * norm;
        for (std::size_t i = 0; i < pn->value.size(); ++i) {
          if (mask.grid[i % plane]) continue;
          const double raw = pn->value[i];
          if (raw <= eps || raw >= 1.0 - eps) continue;
          const double x = tn->value[i];
          pn->grad[i] += static_cast<T>(-g * (x / raw - (1.0 - x) / (1.0 - raw)));
        }
      },
      probs);
}

/// Mean negative Beta log-density over unobserved pixels of all channels:
/// -1/(C m (D-P)) sum log p_Beta(x; alpha, beta). Targets must lie in (0, 1).
template <typename T>
Tensor<T> beta_patch_loss(const BetaMaps<T>& maps, const Tensor<T>& targets, const Mask& mask) {
  detail::check_maps(maps.alpha, targets, mask, "beta_patch_loss");
  detail::check_maps(maps.beta, targets, mask, "beta_patch_loss");
  const std::size_t batch = targets.dim(0), channels = targets.dim(1), plane = mask.grid.size();
  const double norm = 1.0 / static_cast<double>(batch * channels * detail::unobserved_count(mask));
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (mask.grid[i % plane]) continue;
    const double x = targets[i];
    if (!(x > 0.0 && x < 1.0)) {
      throw std::domain_error("beta_patch_loss: target " + std::to_string(x) + " outside (0, 1); clamp the data");
    }
    total += beta_log_density(x, maps.alpha[i], maps.beta[i]);
  }
  auto an = maps.alpha.node(), bn = maps.beta.node(), tn = targets.node();
  return detail::make_result<T>(
      {1}, {static_cast<T>(-total * norm)},
      [an, bn, tn, mask, norm, plane](detail::Node<T>& self) {
        const double g = static_cast<double>(self.grad[0]) * norm;
        if (an->requires_grad) an->ensure_grad();
        if (bn->requires_grad) bn->ensure_grad();
        for (std::size_t i = 0; i < tn->value.size(); ++i) {
          if (mask.grid[i % plane]) continue;
          const double x = tn->value[i], a = an->value[i], b = bn->value[i];
          const double psi_ab = digamma(a + b);
          // d/da log p = ln x - psi(a) + psi(a+b), likewise for b with ln(1-x)
          if (an->requires_grad) an->grad[i] += static_cast<T>(-g * (std::log(x) - digamma(a) + psi_ab));
          if (bn->requires_grad) bn->grad[i] += static_cast<T>(-g * (std::log1p(-x) - digamma(b) + psi_ab));
        }
      },
      maps.alpha, maps.beta);
}

}  // namespace convnade
