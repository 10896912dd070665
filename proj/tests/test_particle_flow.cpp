#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "siegel/experiment.hpp"

using namespace siegel;

namespace {

SimConfig particle_config(int n, double beta, std::vector<double> sigma0, double t_final, std::size_t paths,
                          std::uint64_t seed) {
  SimConfig c;
  c.n = n;
  c.beta = beta;
  c.sigma0 = std::move(sigma0);
  c.t_final = t_final;
  c.dt = 1e-3;
  c.n_paths = paths;
  c.seed = seed;
  c.sample_times = {0.0, t_final};
  c.scheme = Scheme::Particle;
  return c;
}

double sum_cosh(const std::vector<double>& s) {
  double a = 0.0;
  for (double v : s) a += std::cosh(v);
  return a;
}

}  // namespace

TEST(SiegelDrift, KnownValuesAndEntropyGradient) {
  EXPECT_NEAR(siegel_drift(SpectralCoord{1.0})(0), 0.5 * std::cosh(1.0) / std::sinh(1.0), 1e-15);
  EXPECT_NEAR(siegel_drift(SpectralCoord{1.0})(0), 0.6565176, 1e-7);
  std::mt19937_64 rng(30);
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      const RealVector s = oracle::random_chamber(rng, n);
      const SpectralCoord sc(s);
      const RealVector d = siegel_drift(sc);
      EXPECT_EQ(d, RealVector(0.5 * entropy_gradient(sc)));
      // direct evaluation of 1/2 (coth s_k + sum_l sinh s_k / (cosh s_k - cosh s_l))
      for (int k = 0; k < n; ++k) {
        double direct = std::cosh(s(k)) / std::sinh(s(k));
        for (int l = 0; l < n; ++l)
          if (l != k) direct += std::sinh(s(k)) / (std::cosh(s(k)) - std::cosh(s(l)));
        EXPECT_NEAR(d(k), 0.5 * direct, 1e-14 * std::max(1.0, std::abs(direct)));
      }
      EXPECT_LE((d - normal_drift(sc)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(SiegelDrift, PermutationEquivariantOffTheOrdering) {
  // The extended gradient is symmetric under relabeling of coordinates.
  const std::vector<double> s{0.4, 1.3, 2.2};
  const std::vector<double> p{2.2, 0.4, 1.3};
  std::vector<double> gs(3), gp(3);
  detail::entropy_gradient_into(s, gs);
  detail::entropy_gradient_into(p, gp);
  EXPECT_DOUBLE_EQ(gp[0], gs[2]);
  EXPECT_DOUBLE_EQ(gp[1], gs[0]);
  EXPECT_DOUBLE_EQ(gp[2], gs[1]);
}

TEST(StepParticles, ZeroStepAndDeterministicLimit) {
  ParticleState st{RealVector{{0.5, 1.5}}, 0.0, std::nullopt};
  const std::vector<double> xi{0.3, -0.7};
  EXPECT_EQ(step_particles(st, 2.0, 0.0, xi).sigma, st.sigma);
  const ParticleState next = step_particles(st, kInfiniteBeta, 1e-2, xi);
  const RealVector expect = st.sigma + 1e-2 * siegel_drift(SpectralCoord(st.sigma));
  EXPECT_LE((next.sigma - expect).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(next.t, 1e-2);

  const ParticleState noisy = step_particles(st, 2.0, 1e-2, xi);
  const RealVector e2 = expect + std::sqrt(1e-2) * RealVector{{0.3, -0.7}};
  EXPECT_LE((noisy.sigma - e2).norm(), 1e-15);
}

TEST(StepParticles, CutoffFreezesPastTheEntropyThreshold) {
  // S(0.5, 0.5 + 1e-9) is about -21.4; with k = 5, -S/k > 2 and eta = 0.
  ParticleState st{RealVector{{0.5, 0.5 + 1e-9}}, 0.0, std::nullopt};
  const std::vector<double> xi{1.0, -1.0};
  const ParticleState next = step_particles(st, 1.0, 1e-3, xi, Cutoff{5.0, 50.0}, 1e-12);
  EXPECT_EQ(next.sigma, st.sigma);
  // Deep in the interior eta = 1 and the step matches the uncut one.
  ParticleState mid{RealVector{{1.0, 2.0}}, 0.0, std::nullopt};
  EXPECT_EQ(step_particles(mid, 1.0, 1e-3, xi, Cutoff{}).sigma, step_particles(mid, 1.0, 1e-3, xi).sigma);
}

TEST(StepParticles, ChamberViolationThrows) {
  ParticleState st{RealVector{{0.5, 0.6}}, 0.0, std::nullopt};
  const std::vector<double> xi{50.0, -50.0};
  try {
    step_particles(st, 2.0, 1e-2, xi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChamberExit);
  }
}

TEST(ParticlePaths, DeterministicAndThreadIndependent) {
  SimConfig c = particle_config(2, 2.0, {0.5, 1.5}, 0.2, 40, 77);
  const PathEnsemble a = simulate_particle_paths(c, {1});
  const PathEnsemble b = simulate_particle_paths(c, {3});
  ASSERT_EQ(a.paths.size(), b.paths.size());
  for (std::size_t p = 0; p < a.paths.size(); ++p) EXPECT_EQ(a.paths[p].sigma, b.paths[p].sigma);
  c.seed = 78;
  const PathEnsemble d = simulate_particle_paths(c);
  EXPECT_NE(a.paths[0].sigma.back(), d.paths[0].sigma.back());
}

TEST(ParticlePaths, SumCoshMomentLaw) {
  for (int n : {1, 2, 3}) {
    for (double beta : {2.0, 4.0}) {
      std::vector<double> s0;
      for (int k = 0; k < n; ++k) s0.push_back(0.6 + 0.5 * k);
      const SimConfig c = particle_config(n, beta, s0, 0.5, 2000, 100 + n);
      const MomentReport m = moment_report(simulate_particle_paths(c));
      const double expect = sum_cosh(s0) * std::exp((n / 2.0 + 1.0 / beta) * 0.5);
      const auto& last = m.times.back();
      EXPECT_LE(std::abs(last.sum_cosh.mean - expect), 3.0 * last.sum_cosh.se) << "n=" << n << " beta=" << beta;
    }
  }
}

TEST(ParticlePaths, NoExitsAtBetaFour) {
  // Dimension 1 + beta/2 = 3 at every wall: far from critical.
  const SimConfig c = particle_config(3, 4.0, {0.5, 1.0, 1.5}, 1.0, 1000, 5);
  EXPECT_EQ(simulate_particle_paths(c).stopped_count(), 0u);
}

TEST(ParticlePaths, SmallBetaStopsSomePaths) {
  SimConfig c = particle_config(2, 0.5, {0.9, 1.0}, 1.0, 500, 6);
  const PathEnsemble e = simulate_particle_paths(c);
  EXPECT_GT(e.stopped_count(), 0u);
  for (const auto& p : e.paths) {
    if (!p.events.stopped) continue;
    EXPECT_EQ(p.events.stop_reason, "chamber-exit");
    EXPECT_GE(p.events.stop_time, 0.0);
    EXPECT_LE(p.events.stop_time, 1.0);
    EXPECT_TRUE(p.stopped.back());
  }
}

TEST(ParticlePaths, SamplesStayOrdered) {
  const PathEnsemble e = simulate_particle_paths(particle_config(3, 2.0, {0.5, 1.0, 1.5}, 0.3, 200, 8));
  for (const auto& p : e.paths)
    for (const auto& s : p.sigma) EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
}

TEST(ParticlePaths, ExchangeableInLaw) {
  // Two independent seeds give indistinguishable marginals.
  const PathEnsemble a = simulate_particle_paths(particle_config(2, 2.0, {0.5, 1.5}, 0.5, 2000, 41));
  const PathEnsemble b = simulate_particle_paths(particle_config(2, 2.0, {0.5, 1.5}, 0.5, 2000, 42));
  EXPECT_TRUE(compare_ensembles(a, b, 0.5).passed);
}

TEST(MeanCurvature, ClosedFormInOneDimension) {
  const auto traj = integrate_mean_curvature(SpectralCoord{1.0}, 1.0, 1e-3);
  ASSERT_EQ(traj.size(), 1001u);
  const double exact = std::acosh(std::cosh(1.0) * std::exp(0.5));
  EXPECT_NEAR(traj.back()[0], exact, 1e-10);
  EXPECT_NEAR(std::cosh(traj.back()[0]), 2.5441099, 1e-7);
}

TEST(MeanCurvature, FourthOrderConvergence) {
  const double exact = std::acosh(std::cosh(1.0) * std::exp(0.5));
  std::vector<double> err;
  for (double h : {0.1, 0.05, 0.025}) err.push_back(std::abs(integrate_mean_curvature(SpectralCoord{1.0}, 1.0, h).back()[0] - exact));
  EXPECT_GE(err[0] / err[1], 12.0);
  EXPECT_LE(err[0] / err[1], 20.0);
  EXPECT_GE(err[1] / err[2], 12.0);
  EXPECT_LE(err[1] / err[2], 20.0);
}

TEST(MeanCurvature, GapsNeverShrink) {
  std::mt19937_64 rng(31);
  for (int n = 2; n <= 5; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto traj = integrate_mean_curvature(SpectralCoord(oracle::random_chamber(rng, n, 0.1, 2.0, 0.05)), 1.0, 1e-3);
      double prev = 0.0;
      for (const auto& s : traj) {
        double gap = s[0];
        for (int k = 1; k < n; ++k) gap = std::min(gap, s[k] - s[k - 1]);
        if (&s != &traj.front()) {
          double g_only = s[1] - s[0];
          for (int k = 2; k < n; ++k) g_only = std::min(g_only, s[k] - s[k - 1]);
          EXPECT_GE(g_only, prev - 1e-12);
        }
        prev = s[1] - s[0];
        for (int k = 2; k < n; ++k) prev = std::min(prev, s[k] - s[k - 1]);
      }
    }
  }
}

TEST(MeanCurvature, EnsembleSchemeMatchesIntegrator) {
  SimConfig c = particle_config(2, kInfiniteBeta, {0.5, 1.2}, 1.0, 2, 1);
  c.scheme = Scheme::MeanCurvature;
  const PathEnsemble e = simulate(c);
  const auto traj = integrate_mean_curvature(SpectralCoord{0.5, 1.2}, 1.0, 1e-3);
  EXPECT_LE(std::abs(e.paths[0].sigma.back()[0] - traj.back()[0]), 1e-12);
  EXPECT_EQ(e.paths[0].sigma, e.paths[1].sigma);
}

TEST(Dyson, DriftExamples) {
  const RealVector d = dyson_drift(RealVector{{0.0, 1.0}});
  EXPECT_DOUBLE_EQ(d(0), -1.0);
  EXPECT_DOUBLE_EQ(d(1), 1.0);
  std::mt19937_64 rng(32);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    RealVector l(5);
    for (int k = 0; k < 5; ++k) l(k) = g(rng);
    EXPECT_NEAR(dyson_drift(l).sum(), 0.0, 1e-9 * dyson_drift(l).cwiseAbs().sum());
  }
  try {
    dyson_drift(RealVector{{1.0, 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateSpectrum);
  }
}

TEST(Dyson, SecondMomentLaw) {
  for (double beta : {1.0, 2.0, 4.0}) {
    SimConfig c = particle_config(3, beta, {-1.0, 0.0, 1.5}, 0.5, 2000, 50);
    c.scheme = Scheme::Dyson;
    const MomentReport m = moment_report(simulate_dyson(c));
    const double expect = 1.0 + 0.0 + 2.25 + (3.0 * 2.0 + 6.0 / beta) * 0.5;
    EXPECT_LE(std::abs(m.times.back().sum_sq.mean - expect), 3.0 * m.times.back().sum_sq.se) << beta;
  }
}

TEST(Sphere, PointCloudIsExactAtInfiniteBeta) {
  SimConfig c = particle_config(3, kInfiniteBeta, {0.6, -0.3, 0.2}, 1.0, 20, 60);
  c.scheme = Scheme::SpherePoint;
  c.sample_times = stride_grid(0.1, 1.0);
  const PathEnsemble e = simulate_sphere(c);
  const double r0sq = 0.36 + 0.09 + 0.04;
  for (const auto& p : e.paths) {
    for (std::size_t i = 0; i < e.n_times(); ++i) {
      const double r = p.sigma[i][0];
      EXPECT_LE(std::abs(r * r - (r0sq + 2.0 * e.meta.sample_times[i])), 10 * c.dt);
    }
  }
}

TEST(Sphere, RadiusModeClosedForm) {
  SimConfig c = particle_config(4, kInfiniteBeta, {1.0, 0.0, 0.0, 0.0}, 1.0, 1, 61);
  c.scheme = Scheme::SphereRadius;
  const PathEnsemble e = simulate_sphere(c);
  EXPECT_LE(std::abs(e.paths[0].sigma.back()[0] - std::sqrt(1.0 + 3.0)), 10 * c.dt);
}

TEST(Sphere, SquaredRadiusMomentBothModes) {
  for (Scheme mode : {Scheme::SpherePoint, Scheme::SphereRadius}) {
    for (double beta : {2.0, 4.0}) {
      SimConfig c = particle_config(3, beta, {1.0, 0.0, 0.0}, 0.5, 4000, 62);
      c.scheme = mode;
      const MomentReport m = moment_report(simulate_sphere(c));
      const double expect = 1.0 + (2.0 + 2.0 / beta) * 0.5;
      EXPECT_LE(std::abs(m.times.back().sum_sq.mean - expect), 3.0 * m.times.back().sum_sq.se) << to_string(mode);
    }
  }
}

TEST(Sphere, OriginHitStopsPath) {
  // n = 1: no repulsion, |z| is reflected Brownian motion and reaches 0.
  SimConfig c = particle_config(1, 2.0, {0.05}, 1.0, 200, 63);
  c.scheme = Scheme::SphereRadius;
  const PathEnsemble e = simulate_sphere(c);
  EXPECT_GT(e.stopped_count(), 0u);
  for (const auto& p : e.paths)
    if (p.events.stopped) EXPECT_EQ(p.events.stop_reason, "origin-hit");
}
