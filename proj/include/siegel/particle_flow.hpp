#pragma once

// Spectral-level integrators: the interacting-particle SDE
//   d sigma^k = 1/2 dS/d sigma^k dt + sqrt(2/beta) dW^k
// with optional entropy cutoff, its beta = inf limit (mean-curvature ODE),
// the Dyson reference flow and the sphere toy model.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "siegel/config.hpp"
#include "siegel/driver.hpp"
#include "siegel/entropy.hpp"
#include "siegel/geometry.hpp"

namespace siegel {

/// Half the entropy gradient.
inline RealVector siegel_drift(const SpectralCoord& sigma) { return 0.5 * entropy_gradient(sigma); }

/// Component k is sum_{j != k} 1 / (lambda_k - lambda_j).
inline RealVector dyson_drift(const RealVector& lambda) {
  const Eigen::Index n = lambda.size();
  RealVector d = RealVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = k + 1; j < n; ++j) {
      const double gap = lambda(k) - lambda(j);
      if (!(gap != 0.0) || !std::isfinite(gap)) throw Error(ErrorCode::DegenerateSpectrum, "dyson_drift: coincident coordinates");
      d(k) += 1.0 / gap;
      d(j) -= 1.0 / gap;
    }
  }
  return d;
}

namespace detail {

inline bool ordered_beyond(std::span<const double> s, double floor, bool positive) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!std::isfinite(s[k])) return false;
    if (k == 0 ? (positive && !(s[0] > floor)) : !(s[k] - s[k - 1] > floor)) return false;
  }
  return true;
}

inline std::span<const double> as_span(const RealVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace detail

struct ParticleState {
  RealVector sigma;
  double t = 0.0;
  std::optional<std::string> stopped;
};

/// Euler-Maruyama model for the particle SDE; plugs into run_ensemble.
class ParticleModel {
 public:
  using State = RealVector;

  ParticleModel(RealVector sigma0, double beta, std::optional<Cutoff> cutoff, double gap_floor, bool resort = false)
      : sigma0_(std::move(sigma0)), noise_(noise_scale(beta)), cutoff_(cutoff), floor_(gap_floor), resort_(resort) {}

  explicit ParticleModel(const SimConfig& cfg)
      : ParticleModel(Eigen::Map<const RealVector>(cfg.sigma0.data(), cfg.n), cfg.beta, cfg.effective_cutoff(),
                      cfg.gap_floor, cfg.resort) {}

  std::size_t noise_dim() const { return static_cast<std::size_t>(sigma0_.size()); }
  State initial_state() const { return sigma0_; }
  std::vector<double> observe(const State& s) const { return {s.data(), s.data() + s.size()}; }

  StepStatus try_step(State& s, double h, std::span<const double> dw) const {
    if (h == 0.0) return StepStatus::Accepted;
    const double eta = cutoff_ ? cutoff_eta(detail::as_span(s), cutoff_->k, cutoff_->cap) : 1.0;
    if (eta == 0.0) return StepStatus::Accepted;
    RealVector drift(s.size());
    detail::entropy_gradient_into(detail::as_span(s), {drift.data(), static_cast<std::size_t>(drift.size())});
    RealVector next(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      next(k) = s(k) + eta * (0.5 * drift(k) * h + noise_ * dw[static_cast<std::size_t>(k)]);
    }
    if (resort_) {
      next = next.cwiseAbs();
      std::sort(next.data(), next.data() + next.size());
    }
    if (!detail::ordered_beyond(detail::as_span(next), floor_, true)) return StepStatus::ChamberExit;
    s = std::move(next);
    return StepStatus::Accepted;
  }

 private:
  RealVector sigma0_;
  double noise_;
  std::optional<Cutoff> cutoff_;
  double floor_;
  bool resort_;
};

/// Single Euler-Maruyama step from standard normal draws. A step that leaves
/// the chamber throws ChamberExit; the ensemble runner halves instead.
inline ParticleState step_particles(const ParticleState& state, double beta, double h, std::span<const double> gaussians,
                                    std::optional<Cutoff> cutoff = std::nullopt, double gap_floor = 1e-6) {
  if (state.stopped) throw Error(ErrorCode::ConfigInvalid, "step_particles: state is stopped");
  if (gaussians.size() != static_cast<std::size_t>(state.sigma.size())) {
    throw Error(ErrorCode::ShapeMismatch, "step_particles: need one gaussian per coordinate");
  }
  SpectralCoord::validate(state.sigma);
  const ParticleModel model(state.sigma, beta, cutoff, gap_floor);
  std::vector<double> dw(gaussians.begin(), gaussians.end());
  for (double& x : dw) x *= std::sqrt(h);
  ParticleState out = state;
  if (model.try_step(out.sigma, h, dw) != StepStatus::Accepted) {
    throw Error(ErrorCode::ChamberExit, "step_particles: step leaves the chamber");
  }
  out.t += h;
  return out;
}

inline PathEnsemble simulate_particle_paths(const SimConfig& cfg, RunOptions opts = {}) {
  return run_ensemble(ParticleModel(cfg), cfg, opts);
}

/// RK4 on d sigma/dt = 1/2 grad S. Returns the state after every step,
/// starting with sigma0; the last step is shortened to land on T.
inline std::vector<SpectralCoord> integrate_mean_curvature(const SpectralCoord& sigma0, double T, double h) {
  if (!(h > 0.0) || !(T >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "integrate_mean_curvature: need h > 0, T >= 0");
  auto f = [](const RealVector& s) { return siegel_drift(SpectralCoord(s)); };
  std::vector<SpectralCoord> out{sigma0};
  RealVector s = sigma0.values();
  double t = 0.0;
  while (T - t > 1e-12 * std::max(1.0, T)) {
    const double step = std::min(h, T - t);
    const RealVector k1 = f(s);
    const RealVector k2 = f(s + 0.5 * step * k1);
    const RealVector k3 = f(s + 0.5 * step * k2);
    const RealVector k4 = f(s + step * k3);
    s += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.emplace_back(s);
    t += step;
  }
  return out;
}

/// Deterministic RK4 model for the ensemble runner (noise_dim 0).
class MeanCurvatureModel {
 public:
  using State = RealVector;

  MeanCurvatureModel(RealVector sigma0, double gap_floor) : sigma0_(std::move(sigma0)), floor_(gap_floor) {}
  explicit MeanCurvatureModel(const SimConfig& cfg)
      : MeanCurvatureModel(Eigen::Map<const RealVector>(cfg.sigma0.data(), cfg.n), cfg.gap_floor) {}

  std::size_t noise_dim() const { return 0; }
  State initial_state() const { return sigma0_; }
  std::vector<double> observe(const State& s) const { return {s.data(), s.data() + s.size()}; }

  StepStatus try_step(State& s, double h, std::span<const double>) const {
    if (h == 0.0) return StepStatus::Accepted;
    const auto f = [this](const RealVector& x, RealVector& out) {
      if (!detail::ordered_beyond(detail::as_span(x), floor_, true)) return false;
      out.resize(x.size());
      detail::entropy_gradient_into(detail::as_span(x), {out.data(), static_cast<std::size_t>(out.size())});
      out *= 0.5;
      return true;
    };
    RealVector k1, k2, k3, k4;
    if (!f(s, k1) || !f(s + 0.5 * h * k1, k2) || !f(s + 0.5 * h * k2, k3) || !f(s + h * k3, k4)) {
      return StepStatus::ChamberExit;
    }
    RealVector next = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!detail::ordered_beyond(detail::as_span(next), floor_, true)) return StepStatus::ChamberExit;
    s = std::move(next);
    return StepStatus::Accepted;
  }

 private:
  RealVector sigma0_;
  double floor_;
};

/// Euler-Maruyama for d lambda^k = sum_{j != k} 1/(lambda_k - lambda_j) dt + sqrt(2/beta) dW^k.
class DysonModel {
 public:
  using State = RealVector;

  DysonModel(RealVector lambda0, double beta, double gap_floor)
      : lambda0_(std::move(lambda0)), noise_(noise_scale(beta)), floor_(gap_floor) {}
  explicit DysonModel(const SimConfig& cfg)
      : DysonModel(Eigen::Map<const RealVector>(cfg.sigma0.data(), cfg.n), cfg.beta, cfg.gap_floor) {}

  std::size_t noise_dim() const { return static_cast<std::size_t>(lambda0_.size()); }
  State initial_state() const { return lambda0_; }
  std::vector<double> observe(const State& s) const { return {s.data(), s.data() + s.size()}; }

  StepStatus try_step(State& s, double h, std::span<const double> dw) const {
    if (h == 0.0) return StepStatus::Accepted;
    const RealVector d = dyson_drift(s);
    RealVector next(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) next(k) = s(k) + d(k) * h + noise_ * dw[static_cast<std::size_t>(k)];
    if (!detail::ordered_beyond(detail::as_span(next), floor_, false)) return StepStatus::ChamberExit;
    s = std::move(next);
    return StepStatus::Accepted;
  }

 private:
  RealVector lambda0_;
  double noise_;
  double floor_;
};

inline PathEnsemble simulate_dyson(const SimConfig& cfg, RunOptions opts = {}) {
  return run_ensemble(DysonModel(cfg), cfg, opts);
}

struct SphereState {
  RealVector z;  // empty in radius mode
  double r = 0.0;
  double t = 0.0;
};

/// Sphere toy model in R^n: dz = P dB + sqrt(2/beta) P_perp dB with
/// P = I - zz^T/|z|^2. Point mode moves the full point; the new direction is
/// the Euler-Maruyama update and the new squared radius carries the exact
/// quadratic-variation increment (n-1) h of the tangential noise, which makes
/// |z|^2 exact at beta = inf. Radius mode steps
///   dr = (n-1)/(2r) dt + sqrt(2/beta) dW
/// by Euler-Maruyama. Both observe r.
class SphereModel {
 public:
  using State = SphereState;

  SphereModel(RealVector z0, double beta, bool point_mode, double floor)
      : z0_(std::move(z0)), noise_(noise_scale(beta)), point_(point_mode), floor_(floor) {}
  explicit SphereModel(const SimConfig& cfg)
      : SphereModel(Eigen::Map<const RealVector>(cfg.sigma0.data(), cfg.n), cfg.beta,
                    cfg.scheme == Scheme::SpherePoint, cfg.gap_floor) {}

  std::size_t noise_dim() const { return point_ ? static_cast<std::size_t>(z0_.size()) : 1; }

  State initial_state() const {
    State s;
    s.r = z0_.norm();
    if (point_) s.z = z0_;
    return s;
  }

  std::vector<double> observe(const State& s) const { return {s.r}; }

  StepStatus try_step(State& s, double h, std::span<const double> dw) const {
    if (h == 0.0) return StepStatus::Accepted;
    const auto n = static_cast<double>(z0_.size());
    if (!point_) {
      const double r = s.r + 0.5 * (n - 1.0) / s.r * h + noise_ * dw[0];
      if (!(r > floor_)) return StepStatus::OriginHit;
      s.r = r;
      s.t += h;
      return StepStatus::Accepted;
    }
    const Eigen::Map<const RealVector> db(dw.data(), z0_.size());
    const RealVector unit = s.z / s.r;
    const double normal = unit.dot(db);
    const double radial = s.r + noise_ * normal;
    if (!(radial > floor_)) return StepStatus::OriginHit;
    const RealVector dir = radial * unit + (db - normal * unit);
    const double r_new = std::sqrt(radial * radial + (n - 1.0) * h);
    s.z = (r_new / dir.norm()) * dir;
    s.r = r_new;
    s.t += h;
    return StepStatus::Accepted;
  }

 private:
  RealVector z0_;
  double noise_;
  bool point_;
  double floor_;
};

inline PathEnsemble simulate_sphere(const SimConfig& cfg, RunOptions opts = {}) {
  return run_ensemble(SphereModel(cfg), cfg, opts);
}

}  // namespace siegel
