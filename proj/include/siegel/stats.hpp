#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "siegel/ensemble.hpp"
#include "siegel/error.hpp"

namespace siegel {

/// Asymptotic two-sample KS coefficient c(alpha) = sqrt(-ln(alpha/2) / 2).
inline double ks_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::ConfigInvalid, "alpha must lie in (0,1)");
  return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
};

/// sup |F_x - F_y| over the merged sample; rejects when the statistic
/// exceeds c(alpha) sqrt((m+n)/(mn)).
inline KsResult ks_two_sample(std::span<const double> x, std::span<const double> y, double alpha = 0.01) {
  if (x.empty() || y.empty()) throw Error(ErrorCode::EmptySample, "ks_two_sample: empty sample");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double m = static_cast<double>(a.size());
  const double n = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
  }
  KsResult r;
  r.statistic = d;
  r.threshold = ks_critical_value(alpha) * std::sqrt((m + n) / (m * n));
  r.reject = d > r.threshold;
  return r;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(std::span<const double> v) {
  MeanSe out;
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return out;
}

struct TimeMoments {
  double t = 0.0;
  std::size_t active = 0;   // paths not stopped at t
  std::size_t stopped = 0;
  MeanSe sum_cosh;          // sum_k cosh sigma^k
  MeanSe sum_sq;            // sum_k (sigma^k)^2
  std::vector<MeanSe> coord;
  double min_gap = std::numeric_limits<double>::infinity();
  double min_first = std::numeric_limits<double>::infinity();
};

struct MomentReport {
  std::vector<TimeMoments> times;
  double cosh_growth_rate = std::numeric_limits<double>::quiet_NaN();  // slope of log E[sum cosh] vs t
  double sum_sq_slope = std::numeric_limits<double>::quiet_NaN();      // slope of E[sum sigma^2] vs t
};

namespace detail {

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// Values of f(sigma) at time index ti over the paths still running.
template <class F>
std::vector<double> collect(const PathEnsemble& e, std::size_t ti, F f) {
  std::vector<double> out;
  out.reserve(e.paths.size());
  for (const auto& p : e.paths) {
    if (!p.stopped[ti]) out.push_back(f(p.sigma[ti]));
  }
  return out;
}

}  // namespace detail

/// Per-sample-time means and standard errors, excluding stopped paths.
inline MomentReport moment_report(const PathEnsemble& e) {
  MomentReport rep;
  std::vector<double> ts, log_cosh, sq;
  for (std::size_t ti = 0; ti < e.n_times(); ++ti) {
    TimeMoments tm;
    tm.t = e.meta.sample_times[ti];
    for (const auto& p : e.paths) {
      if (p.stopped[ti]) {
        ++tm.stopped;
        continue;
      }
      ++tm.active;
      const auto& s = p.sigma[ti];
      if (!s.empty()) tm.min_first = std::min(tm.min_first, s.front());
      for (std::size_t k = 1; k < s.size(); ++k) tm.min_gap = std::min(tm.min_gap, s[k] - s[k - 1]);
    }
    tm.sum_cosh = mean_se(detail::collect(e, ti, [](const std::vector<double>& s) {
      double acc = 0.0;
      for (double v : s) acc += std::cosh(v);
      return acc;
    }));
    tm.sum_sq = mean_se(detail::collect(e, ti, [](const std::vector<double>& s) {
      double acc = 0.0;
      for (double v : s) acc += v * v;
      return acc;
    }));
    const std::size_t dim = e.paths.empty() ? 0 : e.paths.front().sigma[ti].size();
    for (std::size_t k = 0; k < dim; ++k) {
      tm.coord.push_back(mean_se(detail::collect(e, ti, [k](const std::vector<double>& s) { return s[k]; })));
    }
    if (tm.active > 0) {
      ts.push_back(tm.t);
      log_cosh.push_back(std::log(tm.sum_cosh.mean));
      sq.push_back(tm.sum_sq.mean);
    }
    rep.times.push_back(std::move(tm));
  }
  rep.cosh_growth_rate = detail::ls_slope(ts, log_cosh);
  rep.sum_sq_slope = detail::ls_slope(ts, sq);
  return rep;
}

struct ComparisonReport {
  double t = 0.0;
  double alpha = 0.01;
  double alpha_per_test = 0.01;
  std::vector<std::string> names;
  std::vector<KsResult> tests;
  std::size_t samples_a = 0;
  std::size_t samples_b = 0;
  bool passed = true;
};

/// KS tests on each coordinate marginal and on sum cosh sigma at time t,
/// Bonferroni-corrected over the n + 1 tests. The ensembles may differ in
/// beta; compare_configs is the entry point that insists on like for like.
inline ComparisonReport compare_ensembles(const PathEnsemble& a, const PathEnsemble& b, double t, double alpha = 0.01) {
  if (a.meta.n != b.meta.n) throw Error(ErrorCode::ShapeMismatch, "compare_ensembles: dimension mismatch");
  const std::size_t ia = a.time_index(t);
  const std::size_t ib = b.time_index(t);
  if (ia == PathEnsemble::npos || ib == PathEnsemble::npos) {
    throw Error(ErrorCode::ShapeMismatch, "compare_ensembles: time not on both sample grids");
  }
  ComparisonReport rep;
  rep.t = t;
  rep.alpha = alpha;
  const std::size_t dim = a.paths.empty() ? 0 : a.paths.front().sigma[ia].size();
  if (!b.paths.empty() && b.paths.front().sigma[ib].size() != dim) {
    throw Error(ErrorCode::ShapeMismatch, "compare_ensembles: sample dimension mismatch");
  }
  rep.alpha_per_test = alpha / static_cast<double>(dim + 1);
  for (std::size_t k = 0; k < dim; ++k) {
    auto coord = [k](const std::vector<double>& s) { return s[k]; };
    const auto xa = detail::collect(a, ia, coord);
    const auto xb = detail::collect(b, ib, coord);
    rep.samples_a = xa.size();
    rep.samples_b = xb.size();
    rep.names.push_back("sigma" + std::to_string(k + 1));
    rep.tests.push_back(ks_two_sample(xa, xb, rep.alpha_per_test));
  }
  auto cosh_sum = [](const std::vector<double>& s) {
    double acc = 0.0;
    for (double v : s) acc += std::cosh(v);
    return acc;
  };
  rep.names.emplace_back("sum_cosh");
  rep.tests.push_back(ks_two_sample(detail::collect(a, ia, cosh_sum), detail::collect(b, ib, cosh_sum), rep.alpha_per_test));
  for (const auto& r : rep.tests) rep.passed = rep.passed && !r.reject;
  return rep;
}

}  // namespace siegel
