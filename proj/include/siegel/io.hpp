#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "siegel/config.hpp"
#include "siegel/ensemble.hpp"
#include "siegel/stats.hpp"

namespace siegel {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void config_error(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + why);
}

inline double json_real(const Json& j, const std::string& field) {
  if (!j.is_number()) config_error(field, "expected a number");
  return j.get<double>();
}

inline Complex json_complex(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  config_error(field, "entries must be numbers or [re, im] pairs");
}

// Non-finite values (only beta = inf in practice) are written as strings.
inline Json real_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace detail

/// Build a SimConfig from parsed JSON; throws ConfigInvalid naming the field.
inline SimConfig config_from_json(const Json& j) {
  using detail::config_error;
  if (!j.is_object()) config_error("config", "expected a JSON object");
  static const char* known[] = {"n",      "beta",      "sigma0", "t_final",      "dt",       "n_paths",
                                "seed",   "sample_times", "scheme", "cutoff",    "gap_floor", "q0",
                                "max_halvings", "resort", "histogram_bins"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) config_error(key, "unknown field");
  }
  for (const char* req : {"n", "beta", "sigma0", "t_final", "dt", "n_paths", "seed", "scheme"}) {
    if (!j.contains(req)) config_error(req, "missing");
  }

  SimConfig c;
  if (!j["n"].is_number_integer()) config_error("n", "expected an integer");
  c.n = j["n"].get<int>();

  const Json& beta = j["beta"];
  if (beta.is_string()) {
    if (beta.get<std::string>() != "inf") config_error("beta", "the only string value allowed is \"inf\"");
    c.beta = kInfiniteBeta;
  } else {
    c.beta = detail::json_real(beta, "beta");
  }

  if (!j["sigma0"].is_array()) config_error("sigma0", "expected an array");
  for (const auto& v : j["sigma0"]) c.sigma0.push_back(detail::json_real(v, "sigma0"));

  c.t_final = detail::json_real(j["t_final"], "t_final");
  c.dt = detail::json_real(j["dt"], "dt");
  if (!j["n_paths"].is_number_integer() || j["n_paths"].get<long long>() <= 0) {
    config_error("n_paths", "expected a positive integer");
  }
  c.n_paths = j["n_paths"].get<std::size_t>();
  if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
    config_error("seed", "expected an unsigned 64-bit integer");
  }
  c.seed = j["seed"].get<std::uint64_t>();

  if (!j["scheme"].is_string()) config_error("scheme", "expected a string");
  const auto scheme = parse_scheme(j["scheme"].get<std::string>());
  if (!scheme) config_error("scheme", "unknown scheme '" + j["scheme"].get<std::string>() + "'");
  c.scheme = *scheme;

  if (j.contains("sample_times")) {
    const Json& st = j["sample_times"];
    if (st.is_array()) {
      for (const auto& v : st) c.sample_times.push_back(detail::json_real(v, "sample_times"));
    } else if (st.is_number()) {
      if (!(c.t_final > 0.0)) config_error("t_final", "must be positive");
      c.sample_times = stride_grid(st.get<double>(), c.t_final);
    } else if (st.is_object() && st.contains("stride") && st.size() == 1) {
      if (!(c.t_final > 0.0)) config_error("t_final", "must be positive");
      c.sample_times = stride_grid(detail::json_real(st["stride"], "sample_times.stride"), c.t_final);
    } else {
      config_error("sample_times", "expected an array, a stride, or {\"stride\": x}");
    }
  } else {
    c.sample_times = {0.0, c.t_final};
  }

  if (j.contains("cutoff")) {
    const Json& cut = j["cutoff"];
    if (!cut.is_object() || !cut.contains("k") || !cut.contains("K")) config_error("cutoff", "expected {k, K}");
    c.cutoff = Cutoff{detail::json_real(cut["k"], "cutoff.k"), detail::json_real(cut["K"], "cutoff.K")};
  }
  if (j.contains("gap_floor")) c.gap_floor = detail::json_real(j["gap_floor"], "gap_floor");
  if (j.contains("max_halvings")) {
    if (!j["max_halvings"].is_number_integer()) config_error("max_halvings", "expected an integer");
    c.max_halvings = j["max_halvings"].get<int>();
  }
  if (j.contains("resort")) {
    if (!j["resort"].is_boolean()) config_error("resort", "expected a boolean");
    c.resort = j["resort"].get<bool>();
  }
  if (j.contains("histogram_bins")) {
    if (!j["histogram_bins"].is_number_integer()) config_error("histogram_bins", "expected an integer");
    c.histogram_bins = j["histogram_bins"].get<int>();
  }
  if (j.contains("q0")) {
    const Json& q = j["q0"];
    if (!q.is_array() || q.size() != static_cast<std::size_t>(std::max(c.n, 0))) config_error("q0", "expected n rows");
    ComplexMatrix m(c.n, c.n);
    for (int r = 0; r < c.n; ++r) {
      if (!q[r].is_array() || q[r].size() != static_cast<std::size_t>(c.n)) config_error("q0", "expected n columns");
      for (int col = 0; col < c.n; ++col) m(r, col) = detail::json_complex(q[r][col], "q0");
    }
    c.q0 = m;
  }
  c.validate();
  return c;
}

inline SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config: malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline Json config_to_json(const SimConfig& c) {
  Json j;
  j["n"] = c.n;
  j["beta"] = detail::real_json(c.beta);
  j["sigma0"] = c.sigma0;
  j["t_final"] = c.t_final;
  j["dt"] = c.dt;
  j["n_paths"] = c.n_paths;
  j["seed"] = c.seed;
  j["sample_times"] = c.sample_times;
  j["scheme"] = std::string(to_string(c.scheme));
  if (const auto cut = c.effective_cutoff()) j["cutoff"] = {{"k", cut->k}, {"K", cut->cap}};
  j["gap_floor"] = c.gap_floor;
  return j;
}

/// One JSON line per path per sample time: {path, t, sigma, stopped}.
inline void write_trajectories(std::ostream& out, const PathEnsemble& e) {
  for (std::size_t p = 0; p < e.paths.size(); ++p) {
    const auto& rec = e.paths[p];
    for (std::size_t i = 0; i < e.n_times(); ++i) {
      Json line;
      line["path"] = p;
      line["t"] = e.meta.sample_times[i];
      line["sigma"] = rec.sigma[i];
      line["stopped"] = static_cast<bool>(rec.stopped[i]);
      out << line.dump() << '\n';
    }
  }
}

/// Inverse of write_trajectories. Only the sample grid and samples are
/// recovered; the remaining metadata is not stored in the JSONL.
inline PathEnsemble read_trajectories(std::istream& in) {
  PathEnsemble e;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      throw Error(ErrorCode::IoError, "trajectory line " + std::to_string(lineno) + " is not valid JSON");
    }
    const auto p = j.at("path").get<std::size_t>();
    if (p > e.paths.size()) throw Error(ErrorCode::IoError, "trajectory paths out of order");
    if (p == e.paths.size()) e.paths.emplace_back();
    auto& rec = e.paths[p];
    const double t = j.at("t").get<double>();
    if (p == 0) e.meta.sample_times.push_back(t);
    rec.sigma.push_back(j.at("sigma").get<std::vector<double>>());
    rec.stopped.push_back(j.at("stopped").get<bool>());
    if (rec.stopped.back()) rec.events.stopped = true;
  }
  if (!e.paths.empty() && !e.paths.front().sigma.empty()) e.meta.n = static_cast<int>(e.paths.front().sigma.front().size());
  for (const auto& rec : e.paths) {
    if (rec.sigma.size() != e.meta.sample_times.size()) throw Error(ErrorCode::IoError, "ragged trajectory file");
  }
  return e;
}

inline Json moment_report_json(const MomentReport& r) {
  Json j;
  j["times"] = Json::array();
  for (const auto& tm : r.times) {
    Json row;
    row["t"] = tm.t;
    row["active"] = tm.active;
    row["stopped"] = tm.stopped;
    row["sum_cosh"] = {{"mean", detail::real_json(tm.sum_cosh.mean)}, {"se", detail::real_json(tm.sum_cosh.se)}};
    row["sum_sq"] = {{"mean", detail::real_json(tm.sum_sq.mean)}, {"se", detail::real_json(tm.sum_sq.se)}};
    row["coord"] = Json::array();
    for (const auto& c : tm.coord) row["coord"].push_back({{"mean", detail::real_json(c.mean)}, {"se", detail::real_json(c.se)}});
    row["min_gap"] = detail::real_json(tm.min_gap);
    row["min_first"] = detail::real_json(tm.min_first);
    j["times"].push_back(std::move(row));
  }
  j["cosh_growth_rate"] = detail::real_json(r.cosh_growth_rate);
  j["sum_sq_slope"] = detail::real_json(r.sum_sq_slope);
  return j;
}

inline Json events_json(const PathEnsemble& e) {
  std::size_t rejections = 0;
  int depth = 0;
  Json stops = Json::array();
  for (std::size_t p = 0; p < e.paths.size(); ++p) {
    const auto& ev = e.paths[p].events;
    rejections += ev.rejections;
    depth = std::max(depth, ev.max_depth);
    if (ev.stopped) stops.push_back({{"path", p}, {"time", detail::real_json(ev.stop_time)}, {"reason", ev.stop_reason}});
  }
  return {{"rejections", rejections}, {"max_halving_depth", depth}, {"stopped_paths", e.stopped_count()}, {"stops", stops}};
}

inline Json comparison_json(const ComparisonReport& r) {
  Json j;
  j["t"] = r.t;
  j["alpha"] = r.alpha;
  j["alpha_per_test"] = r.alpha_per_test;
  j["samples"] = {r.samples_a, r.samples_b};
  j["tests"] = Json::array();
  for (std::size_t i = 0; i < r.tests.size(); ++i) {
    j["tests"].push_back({{"name", r.names[i]},
                          {"statistic", r.tests[i].statistic},
                          {"threshold", r.tests[i].threshold},
                          {"reject", r.tests[i].reject}});
  }
  j["passed"] = r.passed;
  return j;
}

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

/// Equal-width histogram over [min, max] of the sample.
inline std::vector<HistogramBin> histogram(std::span<const double> v, int bins) {
  std::vector<HistogramBin> out;
  if (v.empty() || bins <= 0) return out;
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) hi = lo + 1.0;
  const double w = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) out.push_back({lo + b * w, b + 1 == bins ? hi : lo + (b + 1) * w, 0});
  for (double x : v) {
    auto b = static_cast<int>((x - lo) / w);
    out[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))].count++;
  }
  return out;
}

inline void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
  out << "bin_left,bin_right,count\n";
  out << std::setprecision(17);
  for (const auto& b : bins) out << b.left << ',' << b.right << ',' << b.count << '\n';
}

}  // namespace siegel
