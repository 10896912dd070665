#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "siegel/io.hpp"
#include "siegel/matrix_flow.hpp"
#include "siegel/particle_flow.hpp"
#include "siegel/stats.hpp"

namespace siegel {

/// Run the ensemble described by cfg with the integrator its scheme names.
inline PathEnsemble simulate(const SimConfig& cfg, RunOptions opts = {}) {
  cfg.validate();
  switch (cfg.scheme) {
    case Scheme::Matrix: return simulate_matrix_paths(cfg, opts);
    case Scheme::MatrixChart: return run_ensemble(MatrixChartModel(cfg), cfg, opts);
    case Scheme::Particle: return simulate_particle_paths(cfg, opts);
    case Scheme::MeanCurvature: return run_ensemble(MeanCurvatureModel(cfg), cfg, opts);
    case Scheme::Dyson: return simulate_dyson(cfg, opts);
    case Scheme::SpherePoint:
    case Scheme::SphereRadius: return simulate_sphere(cfg, opts);
  }
  throw Error(ErrorCode::ConfigInvalid, "scheme: unhandled");
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  return out;
}

}  // namespace detail

/// Simulate and write trajectories.jsonl, summary.json and, when
/// histogram_bins > 0, histogram_sigma<k>.csv at the final sample time.
inline PathEnsemble run_experiment(const SimConfig& cfg, const std::filesystem::path& out_dir, RunOptions opts = {}) {
  PathEnsemble e = simulate(cfg, opts);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  {
    auto out = detail::open_out(out_dir / "trajectories.jsonl");
    write_trajectories(out, e);
    if (!out) throw Error(ErrorCode::IoError, "write failed for trajectories.jsonl");
  }
  Json summary;
  summary["config"] = config_to_json(cfg);
  summary["moments"] = moment_report_json(moment_report(e));
  summary["events"] = events_json(e);
  {
    auto out = detail::open_out(out_dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  if (cfg.histogram_bins > 0 && !e.paths.empty()) {
    const std::size_t last = e.n_times() - 1;
    const std::size_t dim = e.paths.front().sigma[last].size();
    for (std::size_t k = 0; k < dim; ++k) {
      const auto v = detail::collect(e, last, [k](const std::vector<double>& s) { return s[k]; });
      auto out = detail::open_out(out_dir / ("histogram_sigma" + std::to_string(k + 1) + ".csv"));
      write_histogram_csv(out, histogram(v, cfg.histogram_bins));
    }
  }
  return e;
}

/// Run two configurations that may differ only in scheme and compare their
/// sigma marginals at time t.
inline ComparisonReport compare_configs(const SimConfig& a, const SimConfig& b, double t, RunOptions opts = {}) {
  if (a.n != b.n) throw Error(ErrorCode::ConfigInvalid, "n: configurations disagree");
  if (a.beta != b.beta) throw Error(ErrorCode::ConfigInvalid, "beta: configurations disagree");
  const PathEnsemble ea = simulate(a, opts);
  const PathEnsemble eb = simulate(b, opts);
  return compare_ensembles(ea, eb, t);
}

}  // namespace siegel
