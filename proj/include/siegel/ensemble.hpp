#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace siegel {

struct EnsembleMeta {
  int n = 0;
  double beta = 0.0;
  double h = 0.0;
  double t_final = 0.0;
  std::uint64_t seed = 0;
  std::string scheme;
  std::vector<double> sample_times;
};

/// Per-path log of step rejections and early stops.
struct PathEvents {
  std::size_t rejections = 0;
  int max_depth = 0;  // deepest halving level reached
  bool stopped = false;
  double stop_time = std::numeric_limits<double>::quiet_NaN();
  std::string stop_reason;
};

/// One trajectory sampled on the ensemble's time grid. After a stop the
/// last accepted state is repeated with stopped = true.
struct PathRecord {
  std::vector<std::vector<double>> sigma;
  std::vector<bool> stopped;
  PathEvents events;
};

struct PathEnsemble {
  EnsembleMeta meta;
  std::vector<PathRecord> paths;

  std::size_t n_paths() const { return paths.size(); }
  std::size_t n_times() const { return meta.sample_times.size(); }

  /// Index of the sample time closest to t, or npos when none is within tol.
  std::size_t time_index(double t, double tol = 1e-9) const {
    for (std::size_t i = 0; i < meta.sample_times.size(); ++i) {
      if (std::abs(meta.sample_times[i] - t) <= tol * std::max(1.0, std::abs(t))) return i;
    }
    return npos;
  }

  std::size_t stopped_count() const {
    std::size_t c = 0;
    for (const auto& p : paths) c += p.events.stopped ? 1 : 0;
    return c;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

}  // namespace siegel
