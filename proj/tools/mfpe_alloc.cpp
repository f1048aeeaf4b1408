// mfpe-alloc: run allocation experiments or check a scenario file.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mfpe/config.hpp"
#include "mfpe/experiments.hpp"
#include "mfpe/parallel.hpp"

namespace {

mfpe::ScenarioConfig load(const std::string& path) {
  return path.empty() ? mfpe::default_config() : mfpe::load_config(path);
}

void print_errors(const mfpe::ConfigError& e) {
  std::cerr << "configuration invalid:\n";
  for (const auto& msg : e.errors()) std::cerr << "  " << msg << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asset allocation by economic-equity maximisation for a non-life insurer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string experiment_name;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;

  auto* run = app.add_subcommand("run", "Run a named experiment and write <name>.csv and <name>-report.txt");
  run->add_option("--config", config_path, "Scenario file (reference scenario when omitted)");
  run->add_option("--experiment", experiment_name, "Experiment name, or 'all'")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override simulation.seed");
  run->add_option("--paths", paths, "Override both simulation path counts");

  bool print_effective = false;
  auto* check = app.add_subcommand("validate", "Parse and validate a scenario file");
  check->add_option("--config", config_path, "Scenario file")->required();
  check->add_flag("--print-effective-config", print_effective, "Print the fully resolved scenario");

  run->footer(std::string("Environment: ") + mfpe::kWorkersEnv + " caps the number of worker threads.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mfpe::exit_code::ok : mfpe::exit_code::usage;
  }

  try {
    if (*check) {
      const auto config = load(config_path);
      if (print_effective) {
        std::cout << mfpe::effective_config(config);
      } else {
        std::cout << "ok\n";
      }
      return mfpe::exit_code::ok;
    }

    const auto experiment = mfpe::parse_experiment(experiment_name);
    if (!experiment) {
      std::cerr << "unknown experiment '" << experiment_name << "'; expected one of:";
      for (auto e : mfpe::single_experiments()) std::cerr << ' ' << mfpe::to_string(e);
      std::cerr << " all\n";
      return mfpe::exit_code::usage;
    }

    auto config = load(config_path);
    if (seed) config.simulation.seed = *seed;
    if (paths) {
      config.simulation.n_paths_curve = *paths;
      config.simulation.n_paths_final = *paths;
    }
    if (auto errors = mfpe::validate(config); !errors.empty()) throw mfpe::ConfigError(std::move(errors));

    mfpe::ExperimentRunner runner(std::move(config));
    for (const auto& file : runner.run(*experiment, out_dir)) std::cout << file.string() << '\n';
    return mfpe::exit_code::ok;
  } catch (const mfpe::ConfigError& e) {
    print_errors(e);
    return mfpe::exit_code::config;
  } catch (const mfpe::SolverError& e) {
    std::cerr << "solver failed: " << e.what() << '\n';
    return mfpe::exit_code::solver;
  } catch (const mfpe::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return mfpe::exit_code::io;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return mfpe::exit_code::io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mfpe::exit_code::usage;
  }
}
