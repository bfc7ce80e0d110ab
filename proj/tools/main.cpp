#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathtrack/experiment.hpp"

namespace {

pathtrack::ExperimentConfig make_config(const std::string& config_file, bool seed_set,
                                        std::uint64_t seed) {
  pathtrack::ExperimentConfig config;
  if (!config_file.empty()) {
    config = pathtrack::load_config(config_file);
  }
  if (seed_set) {
    config.perturbation.seed = seed;
  }
  return config;
}

void print_controller_summary(const pathtrack::ControllerReport& report) {
  std::cout << "  " << report.name << ": pos_rmse " << report.metrics.pos_rmse << " m, cost "
            << report.total_cost;
  if (report.name == "ilqr") {
    std::cout << ", " << report.iterations << " iteration(s), "
              << (report.converged ? "converged" : "not converged");
  }
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference-path tracking for a differential-drive robot"};
  app.require_subcommand(1);

  std::string config_file;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool gnuplot = false;
  std::vector<int> sweep_n;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON config file (defaults apply when omitted)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the perturbation seed");
  };

  CLI::App* path_cmd = app.add_subcommand("path", "reference path utilities");
  path_cmd->require_subcommand(1);
  CLI::App* generate = path_cmd->add_subcommand("generate", "write the reference path as CSV");
  add_common(generate);

  CLI::App* run = app.add_subcommand("run", "track the path with the configured controller(s)");
  add_common(run);
  run->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");

  CLI::App* compare = app.add_subcommand("compare", "run both controllers on identical inputs");
  add_common(compare);
  compare->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");
  compare->add_option("--sweep-n", sweep_n, "rerun over these reference point counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    app.exit(e);
    return 1;
  }

  try {
    const bool seed_set = generate->count("--seed") > 0 || run->count("--seed") > 0 ||
                          compare->count("--seed") > 0;
    const pathtrack::ExperimentConfig config = make_config(config_file, seed_set, seed);

    if (generate->parsed()) {
      pathtrack::generate_path_files(config, out_dir);
      std::cout << "wrote " << (std::filesystem::path(out_dir) / "path.csv").string() << "\n";
    } else if (run->parsed()) {
      const pathtrack::RunReport report = pathtrack::run_experiment(config, out_dir, gnuplot);
      std::cout << "wrote " << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
      for (const auto& controller : report.controllers) {
        print_controller_summary(controller);
      }
    } else if (compare->parsed()) {
      const pathtrack::CompareReport report =
          pathtrack::compare_experiment(config, out_dir, sweep_n, gnuplot);
      std::cout << "wrote " << (std::filesystem::path(out_dir) / "compare.json").string() << "\n";
      for (const auto& entry : report.entries) {
        std::cout << "  " << entry.label << ": cost delta (" << report.pair[1] << " - "
                  << report.pair[0] << ") = " << entry.cost_delta << "\n";
      }
    }
  } catch (const pathtrack::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pathtrack::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
