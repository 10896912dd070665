#pragma once

// Boltzmann entropy of the orbit foliation in spectral coordinates,
//   S(sigma) = sum_k log sinh s_k + sum_{k<l} log|cosh s_k - cosh s_l|,
// with the additive constant fixed to zero; its derivatives; and the
// Lyapunov function and cutoff used by the truncated particle SDE.

#include <cmath>
#include <limits>
#include <span>

#include "siegel/geometry.hpp"

namespace siegel {

namespace detail {

// Symmetric extension of S to any real vector: -inf unless all coordinates
// are positive and pairwise distinct.
inline double entropy_extended(std::span<const double> s) {
  const std::size_t n = s.size();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(s[k] > 0.0)) return -std::numeric_limits<double>::infinity();
    total += std::log(std::sinh(s[k]));
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      const double diff = std::abs(std::cosh(s[k]) - std::cosh(s[l]));
      if (!(diff > 0.0)) return -std::numeric_limits<double>::infinity();
      total += std::log(diff);
    }
  }
  return total;
}

// out_k = coth s_k + sum_{l != k} sinh s_k / (cosh s_k - cosh s_l)
inline void entropy_gradient_into(std::span<const double> s, std::span<double> out) {
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k) out[k] = 1.0 / std::tanh(s[k]);
  for (std::size_t k = 0; k < n; ++k) {
    const double shk = std::sinh(s[k]);
    const double chk = std::cosh(s[k]);
    for (std::size_t l = 0; l < n; ++l) {
      if (l != k) out[k] += shk / (chk - std::cosh(s[l]));
    }
  }
}

inline double log_cosh_norm(std::span<const double> s) {
  // log sum cosh, shifted by the largest |s| to avoid overflow
  double peak = 0.0;
  for (double v : s) peak = std::max(peak, std::abs(v));
  double acc = 0.0;
  for (double v : s) acc += 0.5 * (std::exp(v - peak) + std::exp(-v - peak));
  return peak + std::log(acc);
}

}  // namespace detail

inline double entropy(const SpectralCoord& sigma) {
  return detail::entropy_extended(std::span<const double>(sigma.values().data(), static_cast<std::size_t>(sigma.dim())));
}

/// Euclidean gradient of S; the particle drift is half of this.
inline RealVector entropy_gradient(const SpectralCoord& sigma) {
  RealVector g(sigma.dim());
  detail::entropy_gradient_into(std::span<const double>(sigma.values().data(), static_cast<std::size_t>(sigma.dim())),
                                std::span<double>(g.data(), static_cast<std::size_t>(g.size())));
  return g;
}

/// Euclidean Laplacian of S from the analytic diagonal second derivatives
///   d2S/ds_k^2 = -1/sinh^2 s_k
///              + sum_{l != k} [cosh s_k/(cosh s_k - cosh s_l) - sinh^2 s_k/(cosh s_k - cosh s_l)^2].
inline double entropy_laplacian(const SpectralCoord& sigma) {
  const Eigen::Index n = sigma.dim();
  double lap = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double shk = std::sinh(sigma[k]);
    const double chk = std::cosh(sigma[k]);
    lap -= 1.0 / (shk * shk);
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == k) continue;
      const double d = chk - std::cosh(sigma[l]);
      lap += chk / d - (shk * shk) / (d * d);
    }
  }
  return lap;
}

/// n(n+1)(2n+1)/6, the constant value of Laplacian(S) + |grad S|^2.
inline double laplacian_identity_constant(Eigen::Index n) {
  const auto m = static_cast<double>(n);
  return m * (m + 1.0) * (2.0 * m + 1.0) / 6.0;
}

/// N(sigma) = log sum_i cosh sigma^i, defined on all of R^n.
inline double log_cosh_norm(std::span<const double> sigma) { return detail::log_cosh_norm(sigma); }

/// Smooth plateau: 1 for x <= 1, 0 for x >= 2, q(2-x)/(q(2-x)+q(x-1)) in
/// between with q(t) = exp(-1/t).
inline double smooth_plateau(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - x));
  const double b = std::exp(-1.0 / (x - 1.0));
  return a / (a + b);
}

/// eta(sigma, k, K) = h(-S(sigma)/k) h(N(sigma)/K); zero wherever S = -inf.
inline double cutoff_eta(std::span<const double> sigma, double k, double cap) {
  if (!(k > 0.0) || !(cap > 0.0)) throw Error(ErrorCode::ConfigInvalid, "cutoff parameters must be positive");
  const double s = detail::entropy_extended(sigma);
  if (!std::isfinite(s)) return 0.0;
  return smooth_plateau(-s / k) * smooth_plateau(detail::log_cosh_norm(sigma) / cap);
}

}  // namespace siegel
