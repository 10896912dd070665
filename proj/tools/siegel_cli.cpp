#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "siegel/siegel.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kAssertion = 2, kIo = 3 };

int exit_code_for(const siegel::Error& e) {
  switch (e.code()) {
    case siegel::ErrorCode::ConfigInvalid: return kConfig;
    case siegel::ErrorCode::IoError: return kIo;
    default: return kAssertion;
  }
}

void write_json(const std::filesystem::path& dir, const std::string& name, const siegel::Json& j) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream out(dir / name);
  if (ec || !out) throw siegel::Error(siegel::ErrorCode::IoError, "cannot write " + (dir / name).string());
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Siegel Brownian motion: matrix and particle flows, identity checks"};
  app.require_subcommand(1);

  unsigned threads = 1;
  std::string out_dir = "out";

  auto* sim = app.add_subcommand("simulate", "run one configuration");
  std::string config;
  sim->add_option("--config", config, "JSON configuration")->required();
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--threads", threads, "worker threads (affects speed only)");

  auto* cmp = app.add_subcommand("compare", "run two configurations and compare sigma marginals");
  std::vector<std::string> configs;
  double time = -1.0;
  cmp->add_option("--config", configs, "two JSON configurations")->required()->expected(2);
  cmp->add_option("--time", time, "comparison time (default: final time of the first config)");
  cmp->add_option("--out", out_dir, "output directory");
  cmp->add_option("--threads", threads, "worker threads (affects speed only)");

  auto* ids = app.add_subcommand("check-identities", "randomized checks of the geometric identities");
  int n_max = 3;
  ids->add_option("--n-max", n_max, "largest dimension (1..8)");
  ids->add_option("--out", out_dir, "output directory");

  app.add_subcommand("version", "print the version");

  CLI11_PARSE(app, argc, argv);

  try {
    const siegel::RunOptions opts{threads};
    if (*sim) {
      const siegel::SimConfig cfg = siegel::load_config(config);
      const siegel::PathEnsemble e = siegel::run_experiment(cfg, out_dir, opts);
      std::cout << "wrote " << e.n_paths() << " paths x " << e.n_times() << " samples to " << out_dir << "\n";
      if (e.stopped_count() > 0) std::cout << e.stopped_count() << " paths stopped early\n";
      return kOk;
    }
    if (*cmp) {
      const siegel::SimConfig a = siegel::load_config(configs[0]);
      const siegel::SimConfig b = siegel::load_config(configs[1]);
      const double t = time >= 0.0 ? time : a.t_final;
      const siegel::ComparisonReport rep = siegel::compare_configs(a, b, t, opts);
      const siegel::Json j = siegel::comparison_json(rep);
      write_json(out_dir, "comparison.json", j);
      std::cout << j.dump(2) << "\n";
      return rep.passed ? kOk : kAssertion;
    }
    if (*ids) {
      const siegel::IdentityReport rep = siegel::check_identities(n_max);
      siegel::Json j;
      j["passed"] = rep.passed;
      j["tolerances"] = {{"laplacian", rep.tol.laplacian},     {"drift", rep.tol.drift},
                         {"gradient_fd", rep.tol.gradient_fd}, {"gram", rep.tol.gram},
                         {"cross_ratio", rep.tol.cross_ratio}, {"lambda_range", rep.tol.lambda_range}};
      j["rows"] = siegel::Json::array();
      for (const auto& r : rep.rows) {
        j["rows"].push_back({{"n", r.n},
                             {"c_n", r.c_n},
                             {"laplacian", r.laplacian},
                             {"drift", r.drift},
                             {"gradient_fd", r.gradient_fd},
                             {"gram", r.gram},
                             {"cross_ratio", r.cross_ratio},
                             {"lambda_range", r.lambda_range}});
      }
      write_json(out_dir, "identities.json", j);
      std::cout << j.dump(2) << "\n";
      return rep.passed ? kOk : kAssertion;
    }
    std::cout << "siegel " << siegel::kVersion << "\n";
    return kOk;
  } catch (const siegel::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAssertion;
  }
}
