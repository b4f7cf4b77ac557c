#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mpskernel/runner.hpp"
#include "mpskernel/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exact evaluation of lattice Fourier kernels weighted by matrix product "
               "states, with regression pipelines and a toy-circuit verifier"};
  app.set_version_flag("--version", std::string(mpsk::kToolName) + " " + mpsk::kToolVersion);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_override = 0;
  int threads = 1;
  app.add_option("--config", config_path, "Path to the run config JSON")->required();
  app.add_option("--out", out_dir, "Directory for output artifacts");
  auto* seed_opt =
      app.add_option("--seed-override", seed_override, "Replaces params.seed from the config");
  app.add_option("--threads", threads, "Worker threads for Gram/bench workloads")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  nlohmann::json config;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "config error: cannot open " << config_path << '\n';
      return mpsk::kExitConfigError;
    }
    try {
      in >> config;
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return mpsk::kExitConfigError;
    }
  }

  mpsk::RunOptions options;
  options.out_dir = out_dir;
  options.threads = threads;
  if (seed_opt->count() > 0) options.seed_override = seed_override;
  return mpsk::run_config(config, options);
}
