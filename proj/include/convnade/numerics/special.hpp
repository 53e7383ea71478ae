#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace convnade {

template <typename T>
inline T sigmoid(T x) {
  // symmetric form keeps exp() argument non-positive
  if (x >= T(0)) {
    const T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  const T e = std::exp(x);
  return e / (T(1) + e);
}

/// log(1 + e^x) without overflow for large |x|.
template <typename T>
inline T softplus(T x) {
  return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

/// Natural log of the gamma function for z > 0.
///
/// Lanczos approximation with g = 7 and nine coefficients; arguments below
/// 0.5 go through the reflection formula.
inline double log_gamma(double z) {
  if (!(z > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
  static constexpr std::array<double, 9> kCoef = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z); sin(pi z) > 0 on (0, 0.5)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) - log_gamma(1.0 - z);
  }
  const double x = z - 1.0;
  double a = kCoef[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += kCoef[i] / (x + i);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

inline double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("log_beta: arguments must be positive");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

/// Digamma psi(z) = d/dz log_gamma(z) for z > 0. Needed for gradients of the
/// Beta normalizer.
inline double digamma(double z) {
  if (!(z > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double result = 0.0;
  while (z < 6.0) {
    result -= 1.0 / z;
    z += 1.0;
  }
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  // asymptotic series, Bernoulli numbers B2..B12
  result += std::log(z) - 0.5 * inv -
            inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * 691.0 / 32760)))));
  return result;
}

/// log of the Beta(a, b) density at x in (0, 1).
inline double beta_log_density(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

}  // namespace convnade
