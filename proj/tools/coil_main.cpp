// coil: three-step constrained-optimization pipeline over a learned latent
// representation, plus the matching direct-representation baseline.
//
//   gen-data    build a feasible-phenotype dataset for the configured problem
//   train-vae   train the representation (best of N repeats) on a dataset
//   optimize    run the GA over the latent (or direct) representation
//   experiment  full grid: dataset + VAE + repeated runs per (constraint, D)
//   sweep       decode a latent-coordinate sweep for visualization
//   timing      wall-clock comparison of latent vs direct runs

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "coil/commands.hpp"

namespace {

std::string resolve_out_dir(const std::string& cli_value) {
  if (!cli_value.empty()) return cli_value;
  if (const char* env = std::getenv("COIL_OUT"); env && *env) return env;
  return "coil_out";
}

int resolve_workers(int cli_value) {
  if (cli_value > 0) return cli_value;
  if (const char* env = std::getenv("COIL_WORKERS"); env && *env)
    return std::max(1, std::atoi(env));
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained optimization in a learned latent space"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory (or $COIL_OUT)");
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&](std::uint64_t v) {
          seed_override = v;
          seed_given = true;
        },
        "override the config seed");
  };

  auto* gen_data = app.add_subcommand("gen-data", "generate feasible dataset");
  add_common(gen_data);

  auto* train_vae = app.add_subcommand("train-vae", "train the VAE");
  add_common(train_vae);
  std::string dataset_path;
  train_vae->add_option("--dataset", dataset_path, "dataset CSV path")
      ->required()
      ->check(CLI::ExistingFile);

  auto* optimize = app.add_subcommand("optimize", "run one optimization");
  add_common(optimize);
  std::string model_path;
  bool direct = false;
  optimize->add_option("--model", model_path, "VAE model JSON path");
  optimize->add_flag("--direct", direct, "use the direct representation");

  auto* experiment = app.add_subcommand("experiment", "run the full grid");
  add_common(experiment);
  std::string profile = "full";
  int workers = 0;
  experiment->add_option("--profile", profile, "quick (20) or full (100) repeats")
      ->check(CLI::IsMember({"quick", "full"}));
  experiment->add_option("--workers", workers,
                         "worker threads (or $COIL_WORKERS)");

  auto* sweep = app.add_subcommand("sweep", "latent-coordinate sweep");
  add_common(sweep);
  std::string sweep_model;
  int sweep_dim = 0;
  int grid_points = 201;
  sweep->add_option("--model", sweep_model, "VAE model JSON path")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--dim", sweep_dim, "latent dimension to sweep");
  sweep->add_option("--points", grid_points, "grid points over [-1, 1]");

  auto* timing = app.add_subcommand("timing", "latent vs direct wall clock");
  add_common(timing);
  std::string timing_model;
  int runs = 100;
  timing->add_option("--model", timing_model, "VAE model JSON path")
      ->required()
      ->check(CLI::ExistingFile);
  timing->add_option("--runs", runs, "runs per representation");

  CLI11_PARSE(app, argc, argv);

  try {
    coil::RunConfig config = coil::load_config(config_path);
    if (seed_given) config.seed = seed_override;
    const std::string dir = resolve_out_dir(out_dir);

    if (gen_data->parsed()) {
      const auto out = coil::cmd_gen_data(config, dir);
      std::cout << "wrote " << out.csv_path << " (" << out.dataset.rows.size()
                << " rows)\n";
    } else if (train_vae->parsed()) {
      const auto out = coil::cmd_train_vae(config, dataset_path, dir);
      std::cout << "wrote " << out.model_path
                << " (loss " << out.selection.best.final_loss << ", repeat "
                << out.selection.best_index << ")\n";
    } else if (optimize->parsed()) {
      if (direct == !model_path.empty()) {
        std::cerr << "optimize needs exactly one of --model or --direct\n";
        return 1;
      }
      const auto out = coil::cmd_optimize(config, model_path, direct, dir);
      std::cout << "wrote " << out.summary_path << " (violation "
                << out.result.best_criteria.violation << ", objective error "
                << out.result.best_objective_error << ")\n";
    } else if (experiment->parsed()) {
      const int repeats = profile == "quick" ? 20 : config.experiment.repeats;
      const auto out = coil::cmd_experiment(config, repeats,
                                            resolve_workers(workers), dir);
      std::cout << "wrote " << out.summary_csv_path << "\n";
    } else if (sweep->parsed()) {
      const auto out =
          coil::cmd_sweep(config, sweep_model, sweep_dim, grid_points, dir);
      std::cout << "wrote " << out.csv_path << "\n";
    } else if (timing->parsed()) {
      const auto out = coil::cmd_timing(config, timing_model, runs, dir);
      std::cout << "latent " << out.report.latent_seconds << " s, direct "
                << out.report.direct_seconds << " s, ratio "
                << out.report.ratio << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
