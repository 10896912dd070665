#include <gtest/gtest.h>

#include <random>

#include "siegel/experiment.hpp"

using namespace siegel;

namespace {

PathEnsemble constant_ensemble(std::size_t paths, std::vector<double> sigma) {
  PathEnsemble e;
  e.meta.n = static_cast<int>(sigma.size());
  e.meta.sample_times = {0.0, 1.0};
  for (std::size_t p = 0; p < paths; ++p) e.paths.push_back({{sigma, sigma}, {false, false}, {}});
  return e;
}

}  // namespace

TEST(KsTwoSample, CriticalValue) {
  EXPECT_NEAR(ks_critical_value(0.01), 1.628, 5e-4);
  EXPECT_NEAR(ks_critical_value(0.05), 1.358, 5e-4);
}

TEST(KsTwoSample, IdenticalAndDisjointSamples) {
  const std::vector<double> x{0.3, -1.0, 2.0, 2.0, 5.0};
  const KsResult same = ks_two_sample(x, x);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_FALSE(same.reject);

  const std::vector<double> zeros(1000, 0.0), ones(1000, 1.0);
  const KsResult apart = ks_two_sample(zeros, ones);
  EXPECT_EQ(apart.statistic, 1.0);
  EXPECT_TRUE(apart.reject);
  EXPECT_NEAR(apart.threshold, 1.628 * std::sqrt(2000.0 / 1e6), 1e-3);
}

TEST(KsTwoSample, SymmetricBoundedAndHandlesTies) {
  std::mt19937_64 rng(50);
  std::poisson_distribution<int> pois(3.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(50 + rep), y(70);
    for (double& v : x) v = pois(rng);
    for (double& v : y) v = pois(rng) + (rep % 2);
    const double a = ks_two_sample(x, y).statistic;
    EXPECT_EQ(a, ks_two_sample(y, x).statistic);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
  // Brute-force sup over all sample points.
  const std::vector<double> x{1, 1, 2, 3}, y{1, 2, 2, 4, 5};
  double brute = 0.0;
  for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
    const double fx = std::count_if(x.begin(), x.end(), [t](double v) { return v <= t; }) / 4.0;
    const double fy = std::count_if(y.begin(), y.end(), [t](double v) { return v <= t; }) / 5.0;
    brute = std::max(brute, std::abs(fx - fy));
  }
  EXPECT_DOUBLE_EQ(ks_two_sample(x, y).statistic, brute);
}

TEST(KsTwoSample, EmptySampleThrows) {
  const std::vector<double> x{1.0}, none;
  try {
    ks_two_sample(x, none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySample);
  }
}

TEST(KsTwoSample, CalibratedFalseRejectionRate) {
  // 200 same-law comparisons at alpha = 0.01: the rejection count should sit
  // inside the central 99% band of Binomial(200, 0.01), which is [0, 6].
  const CounterRng master(2024);
  int rejections = 0;
  std::vector<double> x(5000), y(5000);
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    GaussianSource gx(master.split(2 * rep)), gy(master.split(2 * rep + 1));
    gx.fill(x);
    gy.fill(y);
    rejections += ks_two_sample(x, y).reject ? 1 : 0;
  }
  EXPECT_LE(rejections, 6);
}

TEST(MomentReport, ConstantPathHasZeroStandardError) {
  const MomentReport m = moment_report(constant_ensemble(10, {0.5, 1.5}));
  ASSERT_EQ(m.times.size(), 2u);
  EXPECT_EQ(m.times[1].sum_cosh.se, 0.0);
  EXPECT_NEAR(m.times[1].sum_cosh.mean, std::cosh(0.5) + std::cosh(1.5), 1e-15);
  EXPECT_EQ(m.times[1].coord[0].se, 0.0);
  EXPECT_DOUBLE_EQ(m.times[1].min_gap, 1.0);
  EXPECT_DOUBLE_EQ(m.times[1].min_first, 0.5);
  EXPECT_EQ(m.times[1].active, 10u);
  EXPECT_NEAR(m.cosh_growth_rate, 0.0, 1e-15);
}

TEST(MomentReport, StoppedPathsAreExcluded) {
  PathEnsemble e = constant_ensemble(4, {1.0});
  e.paths[0].sigma[1] = {100.0};
  e.paths[0].stopped[1] = true;
  const MomentReport m = moment_report(e);
  EXPECT_EQ(m.times[1].stopped, 1u);
  EXPECT_EQ(m.times[1].active, 3u);
  EXPECT_DOUBLE_EQ(m.times[1].coord[0].mean, 1.0);
}

TEST(MomentReport, StandardErrorShrinksLikeRootPaths) {
  SimConfig c;
  c.n = 2;
  c.beta = 2.0;
  c.sigma0 = {0.5, 1.5};
  c.t_final = 0.2;
  c.dt = 1e-3;
  c.sample_times = {0.0, 0.2};
  c.scheme = Scheme::Particle;
  c.seed = 51;
  c.n_paths = 2000;
  const double se1 = moment_report(simulate(c)).times.back().sum_cosh.se;
  c.n_paths = 4000;
  c.seed = 52;
  const double se2 = moment_report(simulate(c)).times.back().sum_cosh.se;
  EXPECT_NEAR(se2 / se1, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(MomentReport, DeterministicFlowHasNoSpread) {
  SimConfig c;
  c.n = 2;
  c.beta = kInfiniteBeta;
  c.sigma0 = {0.5, 1.5};
  c.t_final = 0.5;
  c.dt = 1e-3;
  c.sample_times = stride_grid(0.1, 0.5);
  c.scheme = Scheme::Particle;
  c.n_paths = 20;
  const MomentReport m = moment_report(simulate(c));
  for (const auto& tm : m.times)
    for (const auto& cm : tm.coord) EXPECT_LE(cm.se * std::sqrt(20.0), 10 * c.dt);
}

TEST(MomentReport, GrowthRateFit) {
  SimConfig c;
  c.n = 2;
  c.beta = 4.0;
  c.sigma0 = {0.5, 1.5};
  c.t_final = 0.5;
  c.dt = 1e-3;
  c.sample_times = stride_grid(0.1, 0.5);
  c.scheme = Scheme::Particle;
  c.n_paths = 4000;
  c.seed = 53;
  const MomentReport m = moment_report(simulate(c));
  const double rate = 1.0 + 0.25;
  EXPECT_NEAR(m.cosh_growth_rate, rate, 0.1 * rate);
}

TEST(CompareEnsembles, SelfComparisonIsZero) {
  SimConfig c;
  c.n = 2;
  c.beta = 2.0;
  c.sigma0 = {0.5, 1.5};
  c.t_final = 0.1;
  c.dt = 1e-3;
  c.sample_times = {0.0, 0.1};
  c.scheme = Scheme::Particle;
  c.n_paths = 200;
  const PathEnsemble e = simulate(c);
  const ComparisonReport r = compare_ensembles(e, e, 0.1);
  ASSERT_EQ(r.tests.size(), 3u);
  for (const auto& t : r.tests) EXPECT_EQ(t.statistic, 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.alpha_per_test, 0.01 / 3.0, 1e-15);
}

TEST(CompareEnsembles, SeparatesDifferentBetas) {
  SimConfig c;
  c.n = 2;
  c.sigma0 = {1.0, 2.0};
  c.t_final = 0.5;
  c.dt = 1e-3;
  c.sample_times = {0.0, 0.5};
  c.scheme = Scheme::Particle;
  c.n_paths = 3000;
  c.beta = 2.0;
  c.seed = 54;
  const PathEnsemble a = simulate(c);
  c.beta = 8.0;
  c.seed = 55;
  const PathEnsemble b = simulate(c);
  EXPECT_FALSE(compare_ensembles(a, b, 0.5).passed);
}

TEST(CompareEnsembles, ShapeMismatch) {
  const PathEnsemble a = constant_ensemble(5, {1.0});
  const PathEnsemble b = constant_ensemble(5, {1.0, 2.0});
  try {
    compare_ensembles(a, b, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
  try {
    compare_ensembles(a, a, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}
