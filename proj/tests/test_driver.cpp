#include <gtest/gtest.h>

#include <cmath>

#include "siegel/driver.hpp"

using namespace siegel;

namespace {

// Integrates dX = dW and rejects any step longer than max_h.
struct WalkModel {
  using State = double;
  double max_h;
  std::size_t noise_dim() const { return 1; }
  State initial_state() const { return 0.0; }
  std::vector<double> observe(const State& s) const { return {s}; }
  StepStatus try_step(State& s, double h, std::span<const double> dw) const {
    if (h > max_h) return StepStatus::ChamberExit;
    s += dw[0];
    return StepStatus::Accepted;
  }
};

struct NeverModel {
  using State = double;
  std::size_t noise_dim() const { return 1; }
  State initial_state() const { return 1.0; }
  std::vector<double> observe(const State& s) const { return {s}; }
  StepStatus try_step(State&, double, std::span<const double>) const { return StepStatus::DomainExit; }
};

SimConfig walk_config(double dt, double t_final) {
  SimConfig c;
  c.n = 1;
  c.sigma0 = {1.0};
  c.dt = dt;
  c.t_final = t_final;
  c.n_paths = 5;
  c.seed = 3;
  c.sample_times = {0.0, t_final};
  return c;
}

}  // namespace

TEST(Driver, HalvingKeepsTheBrownianIncrement) {
  // One outer step: the endpoint is sqrt(h) times the first draw of the
  // path's stream, however the step is subdivided.
  const SimConfig c = walk_config(0.1, 0.1);
  const PathEnsemble whole = run_ensemble(WalkModel{1.0}, c);
  const PathEnsemble split = run_ensemble(WalkModel{0.1 / 16}, c);
  for (std::size_t p = 0; p < c.n_paths; ++p) {
    GaussianSource g(CounterRng(c.seed).split(p));
    const double expect = std::sqrt(0.1) * g();
    EXPECT_NEAR(whole.paths[p].sigma.back()[0], expect, 1e-15);
    EXPECT_NEAR(split.paths[p].sigma.back()[0], expect, 1e-14);
    EXPECT_EQ(split.paths[p].events.max_depth, 4);
    EXPECT_EQ(split.paths[p].events.rejections, 1u + 2u + 4u + 8u);
    EXPECT_FALSE(split.paths[p].events.stopped);
  }
}

TEST(Driver, BridgeHalvesHaveTheRightVariance) {
  // Over many one-step paths the first half of a split increment has
  // variance h/2 and the halves are uncorrelated.
  struct FirstHalf {
    using State = std::vector<double>;
    std::size_t noise_dim() const { return 1; }
    State initial_state() const { return {}; }
    std::vector<double> observe(const State& s) const { return s; }
    StepStatus try_step(State& s, double h, std::span<const double> dw) const {
      if (h > 0.06) return StepStatus::ChamberExit;
      s.push_back(dw[0]);
      return StepStatus::Accepted;
    }
  };
  SimConfig c = walk_config(0.1, 0.1);
  c.n_paths = 20000;
  const PathEnsemble e = run_ensemble(FirstHalf{}, c);
  double v1 = 0, v2 = 0, cov = 0;
  for (const auto& p : e.paths) {
    const auto& s = p.sigma.back();
    ASSERT_EQ(s.size(), 2u);
    v1 += s[0] * s[0];
    v2 += s[1] * s[1];
    cov += s[0] * s[1];
  }
  const double n = static_cast<double>(c.n_paths);
  EXPECT_NEAR(v1 / n, 0.05, 5 * 0.05 * std::sqrt(2 / n));
  EXPECT_NEAR(v2 / n, 0.05, 5 * 0.05 * std::sqrt(2 / n));
  EXPECT_NEAR(cov / n, 0.0, 5 * 0.05 / std::sqrt(n));
}

TEST(Driver, StopsAtTheHalvingFloor) {
  SimConfig c = walk_config(0.1, 0.3);
  c.sample_times = {0.0, 0.1, 0.2, 0.3};
  c.max_halvings = 3;
  const PathEnsemble e = run_ensemble(NeverModel{}, c);
  for (const auto& p : e.paths) {
    EXPECT_TRUE(p.events.stopped);
    EXPECT_EQ(p.events.stop_reason, "domain-exit");
    EXPECT_DOUBLE_EQ(p.events.stop_time, 0.0);
    EXPECT_EQ(p.events.max_depth, 3);
    ASSERT_EQ(p.sigma.size(), 4u);
    EXPECT_FALSE(p.stopped[0]);
    for (std::size_t i = 1; i < 4; ++i) {
      EXPECT_TRUE(p.stopped[i]);
      EXPECT_EQ(p.sigma[i][0], 1.0);
    }
  }
}

TEST(Driver, HitsSampleTimesOffTheStepGrid) {
  SimConfig c = walk_config(0.3, 1.0);
  c.sample_times = {0.0, 0.25, 1.0};
  const PathEnsemble e = run_ensemble(WalkModel{1.0}, c);
  EXPECT_EQ(e.meta.sample_times, c.sample_times);
  EXPECT_EQ(e.paths[0].sigma.size(), 3u);
  EXPECT_EQ(e.paths[0].sigma[0][0], 0.0);
}

TEST(Driver, ThreadCountDoesNotChangeResults) {
  SimConfig c = walk_config(0.01, 0.5);
  c.n_paths = 50;
  const PathEnsemble a = run_ensemble(WalkModel{0.004}, c, {1});
  const PathEnsemble b = run_ensemble(WalkModel{0.004}, c, {4});
  for (std::size_t p = 0; p < c.n_paths; ++p) EXPECT_EQ(a.paths[p].sigma, b.paths[p].sigma);
}
