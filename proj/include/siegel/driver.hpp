#pragma once

// Generic ensemble runner: fixed-step integration on the sample grid with
// reject-and-halve refinement. A rejected step is split in two halves whose
// Wiener increments are drawn from the Brownian bridge, so refinement keeps
// the driving path. Each path owns a stream split from the master seed, so
// results do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "siegel/config.hpp"
#include "siegel/ensemble.hpp"
#include "siegel/random.hpp"

namespace siegel {

enum class StepStatus { Accepted, ChamberExit, DomainExit, OriginHit };

constexpr std::string_view to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Accepted: return "accepted";
    case StepStatus::ChamberExit: return "chamber-exit";
    case StepStatus::DomainExit: return "domain-exit";
    case StepStatus::OriginHit: return "origin-hit";
  }
  return "unknown";
}

/// A model advances State by one step of size h driven by Wiener increments dw;
/// on rejection the state must be left untouched.
template <class M>
concept FlowModel = requires(const M& m, typename M::State& s, double h, std::span<const double> dw) {
  { m.noise_dim() } -> std::convertible_to<std::size_t>;
  { m.initial_state() } -> std::convertible_to<typename M::State>;
  { m.try_step(s, h, dw) } -> std::same_as<StepStatus>;
  { m.observe(std::as_const(s)) } -> std::convertible_to<std::vector<double>>;
};

struct RunOptions {
  unsigned threads = 1;
};

namespace detail {

template <FlowModel M>
class PathIntegrator {
 public:
  PathIntegrator(const M& model, const SimConfig& cfg, GaussianSource gauss)
      : model_(model), cfg_(cfg), gauss_(gauss), dim_(model.noise_dim()) {}

  PathRecord run() {
    PathRecord rec;
    typename M::State state = model_.initial_state();
    double t = 0.0;
    std::vector<double> xi(dim_), dw(dim_);
    for (double target : cfg_.sample_times) {
      while (!rec.events.stopped && target - t > 1e-12 * std::max(1.0, target)) {
        const double h = std::min(cfg_.dt, target - t);
        gauss_.fill(xi);
        const double sq = std::sqrt(h);
        for (std::size_t i = 0; i < dim_; ++i) dw[i] = sq * xi[i];
        if (!advance(state, t, h, dw, 0, rec.events)) break;
        t = (target - (t + h) < 1e-12 * std::max(1.0, target)) ? target : t + h;
      }
      rec.sigma.push_back(model_.observe(state));
      rec.stopped.push_back(rec.events.stopped);
    }
    return rec;
  }

 private:
  bool advance(typename M::State& state, double t0, double h, std::span<const double> dw, int depth,
               PathEvents& ev) {
    typename M::State trial = state;
    const StepStatus st = model_.try_step(trial, h, dw);
    if (st == StepStatus::Accepted) {
      state = std::move(trial);
      return true;
    }
    ++ev.rejections;
    if (depth >= cfg_.max_halvings) {
      ev.stopped = true;
      ev.stop_time = t0;
      ev.stop_reason = std::string(to_string(st));
      return false;
    }
    ev.max_depth = std::max(ev.max_depth, depth + 1);
    std::vector<double> first(dim_), second(dim_);
    const double half_sd = std::sqrt(0.25 * h);
    for (std::size_t i = 0; i < dim_; ++i) {
      first[i] = 0.5 * dw[i] + half_sd * gauss_();
      second[i] = dw[i] - first[i];
    }
    if (!advance(state, t0, 0.5 * h, first, depth + 1, ev)) return false;
    return advance(state, t0 + 0.5 * h, 0.5 * h, second, depth + 1, ev);
  }

  const M& model_;
  const SimConfig& cfg_;
  GaussianSource gauss_;
  std::size_t dim_;
};

}  // namespace detail

inline EnsembleMeta make_meta(const SimConfig& cfg) {
  return EnsembleMeta{cfg.n, cfg.beta, cfg.dt, cfg.t_final, cfg.seed, std::string(to_string(cfg.scheme)),
                      cfg.sample_times};
}

/// Integrate cfg.n_paths independent paths of the model.
template <FlowModel M>
PathEnsemble run_ensemble(const M& model, const SimConfig& cfg, RunOptions opts = {}) {
  cfg.validate();
  PathEnsemble out;
  out.meta = make_meta(cfg);
  out.paths.resize(cfg.n_paths);
  const CounterRng master(cfg.seed);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t p = next.fetch_add(1); p < cfg.n_paths; p = next.fetch_add(1)) {
      detail::PathIntegrator<M> integ(model, cfg, GaussianSource(master.split(p)));
      out.paths[p] = integ.run();
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(cfg.n_paths)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return out;
}

}  // namespace siegel
