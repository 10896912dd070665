#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "siegel/error.hpp"
#include "siegel/linalg.hpp"

namespace siegel {

enum class Scheme {
  Matrix,         // projected SDE in disk coordinates (Heun, Stratonovich)
  MatrixChart,    // (sigma, Q) chart, cross-validation only
  Particle,       // interacting-particle SDE, Euler-Maruyama
  MeanCurvature,  // beta = inf ODE, RK4
  Dyson,          // Dyson Brownian motion reference
  SpherePoint,    // R^n toy model, full point cloud
  SphereRadius,   // R^n toy model, radial SDE
};

constexpr std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Matrix: return "matrix";
    case Scheme::MatrixChart: return "matrix-chart";
    case Scheme::Particle: return "particle";
    case Scheme::MeanCurvature: return "mean-curvature";
    case Scheme::Dyson: return "dyson";
    case Scheme::SpherePoint: return "sphere-point";
    case Scheme::SphereRadius: return "sphere-radius";
  }
  return "unknown";
}

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  for (Scheme v : {Scheme::Matrix, Scheme::MatrixChart, Scheme::Particle, Scheme::MeanCurvature, Scheme::Dyson,
                   Scheme::SpherePoint, Scheme::SphereRadius}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

constexpr bool is_siegel_scheme(Scheme s) {
  return s == Scheme::Matrix || s == Scheme::MatrixChart || s == Scheme::Particle || s == Scheme::MeanCurvature;
}

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

/// sqrt(2/beta), zero at beta = inf.
inline double noise_scale(double beta) { return std::isinf(beta) ? 0.0 : std::sqrt(2.0 / beta); }

/// Entropy cutoff (k, K) of the truncated particle SDE.
struct Cutoff {
  double k = 50.0;
  double cap = 50.0;
};

struct SimConfig {
  int n = 1;
  double beta = 2.0;
  std::vector<double> sigma0;
  double t_final = 1.0;
  double dt = 1e-3;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  std::vector<double> sample_times;  // ascending, within [0, t_final]
  Scheme scheme = Scheme::Particle;
  std::optional<Cutoff> cutoff;
  double gap_floor = 1e-6;
  std::optional<ComplexMatrix> q0;
  int max_halvings = 10;
  bool resort = false;
  int histogram_bins = 0;

  /// Cutoff actually applied: explicit, or the default for beta < 2 on the particle flow.
  std::optional<Cutoff> effective_cutoff() const {
    if (scheme != Scheme::Particle) return std::nullopt;
    if (cutoff) return cutoff;
    if (beta < 2.0) return Cutoff{};
    return std::nullopt;
  }

  /// Throws ConfigInvalid naming the first failing field.
  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw Error(ErrorCode::ConfigInvalid, field + ": " + why);
    };
    if (n < 1 || n > 32) fail("n", "must be in [1, 32]");
    if (!(beta > 0.0)) fail("beta", "must be positive or \"inf\"");
    if (sigma0.size() != static_cast<std::size_t>(n)) fail("sigma0", "length must equal n");
    for (double v : sigma0) {
      if (!std::isfinite(v)) fail("sigma0", "entries must be finite");
    }
    if (is_siegel_scheme(scheme) || scheme == Scheme::Dyson) {
      for (std::size_t k = 1; k < sigma0.size(); ++k) {
        if (!(sigma0[k] - sigma0[k - 1] > gap_floor)) fail("sigma0", "must be strictly ascending beyond gap_floor");
      }
    }
    if (is_siegel_scheme(scheme) && !(sigma0.front() > gap_floor)) fail("sigma0", "must be positive");
    if (scheme == Scheme::SpherePoint || scheme == Scheme::SphereRadius) {
      double r2 = 0.0;
      for (double v : sigma0) r2 += v * v;
      if (!(std::sqrt(r2) > gap_floor)) fail("sigma0", "initial radius must be positive");
    }
    if (!(t_final > 0.0) || !std::isfinite(t_final)) fail("t_final", "must be positive");
    if (!(dt > 0.0) || dt > t_final) fail("dt", "must satisfy 0 < dt <= t_final");
    if (n_paths == 0) fail("n_paths", "must be positive");
    if (sample_times.empty()) fail("sample_times", "must not be empty");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
      const double t = sample_times[i];
      if (!(t >= 0.0 && t <= t_final * (1.0 + 1e-12))) fail("sample_times", "must lie in [0, t_final]");
      if (i > 0 && !(t > sample_times[i - 1])) fail("sample_times", "must be strictly ascending");
    }
    if (cutoff && (!(cutoff->k > 0.0) || !(cutoff->cap > 0.0))) fail("cutoff", "k and K must be positive");
    if (cutoff && scheme != Scheme::Particle) fail("cutoff", "only the particle scheme supports the cutoff");
    if (!(gap_floor > 0.0)) fail("gap_floor", "must be positive");
    if (max_halvings < 0 || max_halvings > 60) fail("max_halvings", "must be in [0, 60]");
    if (scheme == Scheme::MeanCurvature && !std::isinf(beta)) fail("beta", "mean-curvature scheme requires beta = inf");
    if (resort && (scheme != Scheme::Particle || beta < 2.0)) fail("resort", "only for the particle scheme with beta >= 2");
    if (q0) {
      if (scheme != Scheme::Matrix && scheme != Scheme::MatrixChart) fail("q0", "only for matrix schemes");
      if (q0->rows() != n || q0->cols() != n) fail("q0", "must be n x n");
      if ((*q0 * q0->adjoint() - ComplexMatrix::Identity(n, n)).norm() > 1e-10) fail("q0", "must be unitary");
    }
    if (histogram_bins < 0) fail("histogram_bins", "must be nonnegative");
  }
};

/// Sample grid {0, stride, 2 stride, ...} up to and including t_final.
inline std::vector<double> stride_grid(double stride, double t_final) {
  if (!(stride > 0.0)) throw Error(ErrorCode::ConfigInvalid, "sample_times: stride must be positive");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor(t_final / stride + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) out.push_back(std::min(t_final, static_cast<double>(i) * stride));
  if (t_final - out.back() > 1e-12 * t_final) out.push_back(t_final);
  return out;
}

}  // namespace siegel
