#pragma once

// Projected matrix SDE in disk coordinates,
//   dR = sum_i (U_i o dW~^i - 1/2 nabla_{U_i} U_i dt) + sqrt(2/beta) sum_k L_k o dW^k,
// integrated with a Heun predictor-corrector for the Stratonovich part and
// the analytic orbit drift. Spectral coordinates are read back from R.

#include <cmath>
#include <span>
#include <vector>

#include "siegel/config.hpp"
#include "siegel/driver.hpp"
#include "siegel/geometry.hpp"
#include "siegel/particle_flow.hpp"

namespace siegel {

struct MatrixFlowState {
  ComplexMatrix r;
  RealVector sigma_cache;
  TakagiFactors q_cache;
  double t = 0.0;
};

/// R = Q diag(tanh(sigma/2)) Q^T together with consistent caches.
inline MatrixFlowState make_matrix_state(const SpectralCoord& sigma, const ComplexMatrix& q0) {
  const Eigen::Index n = sigma.dim();
  if (q0.rows() != n || q0.cols() != n) throw Error(ErrorCode::ShapeMismatch, "make_matrix_state: q0 must be n x n");
  RealVector mu(n);
  for (Eigen::Index k = 0; k < n; ++k) mu(k) = std::tanh(0.5 * sigma[k]);
  MatrixFlowState s;
  s.r = detail::symmetrized(q0 * mu.cast<Complex>().asDiagonal() * q0.transpose());
  s.q_cache = TakagiFactors{q0, mu};
  s.sigma_cache = sigma.values();
  return s;
}

inline MatrixFlowState make_matrix_state(const SpectralCoord& sigma) {
  return make_matrix_state(sigma, ComplexMatrix::Identity(sigma.dim(), sigma.dim()));
}

/// Spectral coordinates of the state read from the eigenvalues of R conj(R).
inline SpectralCoord extract_sigma(const MatrixFlowState& state) {
  return spectral_coordinates(DiskPoint(state.r));
}

namespace detail {

// Takagi-factor a candidate R, flip columns to match the reference Q, and
// check the chamber. The orbit directions U_(k,l,m) depend on the column
// signs, so predictor and corrector frames must use the same convention.
inline StepStatus refactor(const ComplexMatrix& r, const ComplexMatrix& q_ref, double floor, TakagiFactors& tf,
                           RealVector& sigma) {
  if (!r.allFinite() || !DiskPoint::inside(r)) return StepStatus::DomainExit;
  try {
    tf = takagi_decompose(r, 1e-10);
  } catch (const Error&) {
    return StepStatus::ChamberExit;
  }
  const Eigen::Index n = r.rows();
  sigma.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(tf.mu(k) < 1.0)) return StepStatus::DomainExit;
    sigma(k) = 2.0 * std::atanh(tf.mu(k));
    if ((q_ref.col(k).adjoint() * tf.q.col(k))(0, 0).real() < 0.0) tf.q.col(k) *= -1.0;
  }
  if (!ordered_beyond(as_span(sigma), floor, true)) return StepStatus::ChamberExit;
  return StepStatus::Accepted;
}

// sum_i c_i dW_i V_i over the frame at (tf, sigma): the first n^2
// increments drive the orbit directions, the last n the normal ones.
inline ComplexMatrix frame_increment(const TakagiFactors& tf, const RealVector& sigma, double normal_scale,
                                     std::span<const double> dw) {
  const FrameBasis f = frame_at(tf, SpectralCoord::unchecked(sigma));
  const std::size_t n2 = f.u_vectors.size();
  ComplexMatrix inc = ComplexMatrix::Zero(tf.q.rows(), tf.q.cols());
  for (std::size_t i = 0; i < n2; ++i) inc += dw[i] * f.u_vectors[i];
  if (normal_scale != 0.0) {
    for (std::size_t k = 0; k < f.l_vectors.size(); ++k) inc += (normal_scale * dw[n2 + k]) * f.l_vectors[k];
  }
  return inc;
}

}  // namespace detail

/// Heun step of the projected SDE. Ensemble-runner model.
class MatrixFlowModel {
 public:
  using State = MatrixFlowState;

  MatrixFlowModel(SpectralCoord sigma0, ComplexMatrix q0, double beta, double gap_floor)
      : init_(make_matrix_state(sigma0, q0)), noise_(noise_scale(beta)), floor_(gap_floor) {}

  explicit MatrixFlowModel(const SimConfig& cfg)
      : MatrixFlowModel(SpectralCoord(std::span<const double>(cfg.sigma0)),
                        cfg.q0.value_or(ComplexMatrix::Identity(cfg.n, cfg.n)), cfg.beta, cfg.gap_floor) {}

  std::size_t noise_dim() const {
    const auto n = static_cast<std::size_t>(init_.r.rows());
    return n * n + n;
  }
  State initial_state() const { return init_; }

  std::vector<double> observe(const State& s) const {
    RealVector v;
    try {
      v = extract_sigma(s).values();
    } catch (const Error&) {
      v = s.sigma_cache;
    }
    return {v.data(), v.data() + v.size()};
  }

  StepStatus try_step(State& s, double h, std::span<const double> dw) const {
    if (h == 0.0) return StepStatus::Accepted;
    const Eigen::Index n = s.r.rows();
    const RealVector d = normal_drift(SpectralCoord::unchecked(s.sigma_cache));
    const FrameBasis f0 = frame_at(s.q_cache, SpectralCoord::unchecked(s.sigma_cache));
    ComplexMatrix drift = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) drift += d(k) * f0.l_vectors[static_cast<std::size_t>(k)];
    drift *= h;

    const ComplexMatrix inc0 = detail::frame_increment(s.q_cache, s.sigma_cache, noise_, dw);
    const ComplexMatrix pred = detail::symmetrized(s.r + drift + inc0);
    TakagiFactors tf_pred;
    RealVector sigma_pred;
    if (const StepStatus st = detail::refactor(pred, s.q_cache.q, floor_, tf_pred, sigma_pred); st != StepStatus::Accepted) {
      return st;
    }
    const ComplexMatrix inc1 = detail::frame_increment(tf_pred, sigma_pred, noise_, dw);
    const ComplexMatrix next = detail::symmetrized(s.r + drift + 0.5 * (inc0 + inc1));
    TakagiFactors tf_next;
    RealVector sigma_next;
    if (const StepStatus st = detail::refactor(next, s.q_cache.q, floor_, tf_next, sigma_next); st != StepStatus::Accepted) {
      return st;
    }
    s.r = next;
    s.q_cache = std::move(tf_next);
    s.sigma_cache = std::move(sigma_next);
    s.t += h;
    return StepStatus::Accepted;
  }

 private:
  MatrixFlowState init_;
  double noise_;
  double floor_;
};

/// One step from n^2 + n standard normal draws; throws ChamberExit or
/// DomainExit where the ensemble runner would halve.
inline MatrixFlowState step_matrix_flow(const MatrixFlowState& state, double beta, double h,
                                        std::span<const double> gaussians, double gap_floor = 1e-6) {
  const auto n = static_cast<std::size_t>(state.r.rows());
  if (gaussians.size() != n * n + n) throw Error(ErrorCode::ShapeMismatch, "step_matrix_flow: need n^2 + n gaussians");
  const MatrixFlowModel model(SpectralCoord(state.sigma_cache), state.q_cache.q, beta, gap_floor);
  std::vector<double> dw(gaussians.begin(), gaussians.end());
  for (double& x : dw) x *= std::sqrt(h);
  MatrixFlowState out = state;
  switch (model.try_step(out, h, dw)) {
    case StepStatus::Accepted: return out;
    case StepStatus::DomainExit: throw Error(ErrorCode::DomainExit, "step_matrix_flow: left the disk");
    default: throw Error(ErrorCode::ChamberExit, "step_matrix_flow: spectrum violates the gap floor");
  }
}

inline PathEnsemble simulate_matrix_paths(const SimConfig& cfg, RunOptions opts = {}) {
  return run_ensemble(MatrixFlowModel(cfg), cfg, opts);
}

/// Cross-validation scheme in the (sigma, Q) chart: sigma follows the
/// particle SDE and Q is rotated by unitary_exp of the u(n) noise, with the
/// orbit increments scaled by 1/(2 sinh sigma^k) and
/// 1/(2 sinh(|sigma^k -+ sigma^l|/2)). Observes sigma through R.
class MatrixChartModel {
 public:
  struct State {
    RealVector sigma;
    ComplexMatrix q;
  };

  MatrixChartModel(RealVector sigma0, ComplexMatrix q0, double beta, double gap_floor)
      : init_{std::move(sigma0), std::move(q0)}, particles_(init_.sigma, beta, std::nullopt, gap_floor) {
    const Eigen::Index n = init_.sigma.size();
    basis_ = unitary_algebra_basis(n);
  }

  explicit MatrixChartModel(const SimConfig& cfg)
      : MatrixChartModel(Eigen::Map<const RealVector>(cfg.sigma0.data(), cfg.n),
                         cfg.q0.value_or(ComplexMatrix::Identity(cfg.n, cfg.n)), cfg.beta, cfg.gap_floor) {}

  std::size_t noise_dim() const {
    const auto n = static_cast<std::size_t>(init_.sigma.size());
    return n * n + n;
  }
  State initial_state() const { return init_; }

  std::vector<double> observe(const State& s) const {
    const MatrixFlowState m = make_matrix_state(SpectralCoord::unchecked(s.sigma), s.q);
    RealVector v;
    try {
      v = extract_sigma(m).values();
    } catch (const Error&) {
      v = s.sigma;
    }
    return {v.data(), v.data() + v.size()};
  }

  StepStatus try_step(State& s, double h, std::span<const double> dw) const {
    if (h == 0.0) return StepStatus::Accepted;
    const Eigen::Index n = s.sigma.size();
    const auto un = static_cast<std::size_t>(n);
    // basis_ order: alpha_{k,l}, beta_k, beta_{k,l}; noise order: U_(k), U_(k,l,1), U_(k,l,2).
    const std::size_t pairs = un * (un - 1) / 2;
    ComplexMatrix gen = ComplexMatrix::Zero(n, n);
    std::size_t p = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      gen += (dw[static_cast<std::size_t>(k)] / (2.0 * std::sinh(s.sigma(k)))) * basis_[pairs + static_cast<std::size_t>(k)];
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = k + 1; l < n; ++l, ++p) {
        const double plus = 2.0 * std::sinh(0.5 * (s.sigma(k) + s.sigma(l)));
        const double minus = 2.0 * std::sinh(0.5 * std::abs(s.sigma(k) - s.sigma(l)));
        gen += (dw[un + p] / plus) * basis_[pairs + un + p];
        gen += (dw[un + pairs + p] / minus) * basis_[p];
      }
    }
    RealVector sigma = s.sigma;
    if (const StepStatus st = particles_.try_step(sigma, h, dw.subspan(un * un)); st != StepStatus::Accepted) return st;
    s.q = s.q * unitary_exp(gen);
    s.sigma = std::move(sigma);
    return StepStatus::Accepted;
  }

 private:
  State init_;
  ParticleModel particles_;
  std::vector<ComplexMatrix> basis_;
};

}  // namespace siegel
