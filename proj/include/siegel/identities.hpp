#pragma once

// Randomized checks of the geometric and entropy identities, reported as
// worst-case residuals per dimension.

#include <algorithm>
#include <cmath>
#include <vector>

#include "siegel/entropy.hpp"
#include "siegel/geometry.hpp"
#include "siegel/particle_flow.hpp"
#include "siegel/random.hpp"

namespace siegel {

/// Chamber point with coordinates in [lo, hi] and every gap at least min_gap.
inline SpectralCoord random_chamber_point(CounterRng& rng, Eigen::Index n, double lo = 0.1, double hi = 4.0,
                                          double min_gap = 0.05) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (;;) {
    RealVector s(n);
    for (Eigen::Index k = 0; k < n; ++k) s(k) = u(rng);
    std::sort(s.data(), s.data() + n);
    bool ok = true;
    for (Eigen::Index k = 1; k < n; ++k) ok = ok && s(k) - s(k - 1) >= min_gap;
    if (ok) return SpectralCoord(std::move(s));
  }
}

/// exp of a Gaussian anti-Hermitian matrix: a spread-out random unitary.
inline ComplexMatrix random_unitary(GaussianSource& g, Eigen::Index n) {
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(), g());
  }
  return unitary_exp(0.5 * (a - a.adjoint()));
}

struct IdentityRow {
  int n = 0;
  double c_n = 0.0;
  double laplacian = 0.0;     // |Lap S + |grad S|^2 - c_n| / c_n
  double drift = 0.0;         // |siegel_drift - normal_drift|
  double gradient_fd = 0.0;   // relative central-difference error
  double gram = 0.0;          // max |<V_i, V_j> - delta_ij|
  double cross_ratio = 0.0;   // |R(Z, iI) - R conj(R)|
  double lambda_range = 0.0;  // distance of the cross-ratio spectrum outside [0, 1)
};

struct IdentityTolerances {
  double laplacian = 1e-8;
  double drift = 1e-12;
  double gradient_fd = 1e-5;
  double gram = 1e-10;
  double cross_ratio = 1e-10;
  double lambda_range = 0.0;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  IdentityTolerances tol;
  bool passed = true;
};

namespace detail {

inline double fd_gradient_error(const SpectralCoord& s) {
  const RealVector g = entropy_gradient(s);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    const double h = 1e-6;
    RealVector p = s.values(), m = s.values();
    p(k) += h;
    m(k) -= h;
    const double fd = (entropy(SpectralCoord(p)) - entropy(SpectralCoord(m))) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g(k)) / std::max(1.0, std::abs(g(k))));
  }
  return worst;
}

inline double gram_error(const SpectralCoord& s, const ComplexMatrix& q) {
  RealVector mu(s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) mu(k) = std::tanh(0.5 * s[k]);
  const DiskPoint r(symmetrized(q * mu.cast<Complex>().asDiagonal() * q.transpose()));
  const FrameBasis f = frame_at(TakagiFactors{q, mu}, s);
  const DiskMetric g(r);
  const auto all = f.ordered();
  double worst = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i; j < all.size(); ++j) {
      worst = std::max(worst, std::abs(g(all[i], all[j]) - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace detail

/// Worst-case residuals at `points` random chamber points for n = 1..n_max.
inline IdentityReport check_identities(int n_max, std::uint64_t seed = 20240101, int points = 50) {
  if (n_max < 1 || n_max > 8) throw Error(ErrorCode::ConfigInvalid, "n_max: must be in [1, 8]");
  IdentityReport rep;
  const CounterRng master(seed);
  for (int n = 1; n <= n_max; ++n) {
    CounterRng rng = master.split(static_cast<std::uint64_t>(n));
    GaussianSource g(master.split(1000 + static_cast<std::uint64_t>(n)));
    IdentityRow row;
    row.n = n;
    row.c_n = laplacian_identity_constant(n);
    for (int i = 0; i < points; ++i) {
      const SpectralCoord s = random_chamber_point(rng, n);
      const RealVector grad = entropy_gradient(s);
      row.laplacian = std::max(row.laplacian, std::abs(entropy_laplacian(s) + grad.squaredNorm() - row.c_n) / row.c_n);
      row.drift = std::max(row.drift, (siegel_drift(s) - normal_drift(s)).cwiseAbs().maxCoeff());
      row.gradient_fd = std::max(row.gradient_fd, detail::fd_gradient_error(s));
      const ComplexMatrix q = random_unitary(g, n);
      row.gram = std::max(row.gram, detail::gram_error(s, q));

      RealVector mu(n);
      for (Eigen::Index k = 0; k < n; ++k) mu(k) = std::tanh(0.5 * s[k]);
      const DiskPoint r(detail::symmetrized(q * mu.cast<Complex>().asDiagonal() * q.transpose()));
      const SiegelPoint z = cayley_to_halfspace(r);
      const SiegelPoint base(kI * ComplexMatrix::Identity(n, n));
      const ComplexMatrix cr = cross_ratio(z, base);
      row.cross_ratio = std::max(row.cross_ratio, (cr - r.matrix() * r.matrix().conjugate()).norm());
      const RealVector lam = detail::hermitian_eigen_unchecked(detail::hermitized(cr)).values;
      row.lambda_range = std::max({row.lambda_range, -lam.minCoeff(), lam.maxCoeff() >= 1.0 ? lam.maxCoeff() : 0.0});
    }
    const auto& t = rep.tol;
    rep.passed = rep.passed && row.laplacian <= t.laplacian && row.drift <= t.drift && row.gradient_fd <= t.gradient_fd &&
                 row.gram <= t.gram && row.cross_ratio <= t.cross_ratio && row.lambda_range <= t.lambda_range;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace siegel
