#ifndef COIL_COMMANDS_HPP
#define COIL_COMMANDS_HPP

#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>

#include "coil/config.hpp"
#include "coil/datagen.hpp"
#include "coil/experiment.hpp"
#include "coil/optimize.hpp"
#include "coil/serialize.hpp"

namespace coil {

// File-producing command layer behind the CLI. Every artifact embeds the
// config hash and seed (directly or via its .meta.json sidecar), and every
// command is byte-reproducible for a fixed config and seed; the timing
// command is the one exception since it reports wall-clock measurements.

namespace detail {

inline std::string cell_tag(ConstraintKind constraint, int dimension) {
  return to_string(constraint) + "_D" + std::to_string(dimension);
}

inline std::string ensure_dir(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  return out_dir;
}

inline std::string meta_path_for(const std::string& csv_path) {
  std::string path = csv_path;
  const auto pos = path.rfind(".csv");
  if (pos != std::string::npos) path.erase(pos);
  return path + ".meta.json";
}

}  // namespace detail

struct GenDataOutput {
  std::string csv_path;
  std::string meta_path;
  Dataset dataset;
};

inline GenDataOutput cmd_gen_data(const RunConfig& config,
                                  const std::string& out_dir) {
  const std::string dir = detail::ensure_dir(out_dir);
  const ProblemSpec& spec = config.problem;
  spec.validate();
  Dataset dataset =
      spec.constraint == ConstraintKind::C1
          ? generate_dataset_ga(spec, config.ga_datagen, config.seed,
                                config.dataset)
          : generate_dataset_sampler(spec, config.seed, config.dataset);

  GenDataOutput out;
  out.csv_path = dir + "/dataset_" +
                 detail::cell_tag(spec.constraint, spec.dimension) + ".csv";
  out.meta_path = detail::meta_path_for(out.csv_path);
  save_dataset(dataset, out.csv_path, out.meta_path, config_hash(config));
  out.dataset = std::move(dataset);
  return out;
}

struct TrainVaeOutput {
  std::string model_path;
  std::string log_path;
  TrainSelection selection;
};

inline TrainVaeOutput cmd_train_vae(const RunConfig& config,
                                    const std::string& dataset_csv,
                                    const std::string& out_dir) {
  const std::string dir = detail::ensure_dir(out_dir);
  const Dataset dataset =
      load_dataset(dataset_csv, detail::meta_path_for(dataset_csv));
  ProblemSpec spec{dataset.dimension, dataset.constraint,
                   config.problem.var_min, config.problem.var_max};
  const MatrixXd data = dataset_to_training_matrix(dataset, spec);

  TrainVaeOutput out;
  out.selection = train_select_best(
      data, config.vae_architecture(dataset.dimension), config.vae_train,
      config.seed);

  const std::string tag = detail::cell_tag(dataset.constraint,
                                           dataset.dimension);
  out.model_path = dir + "/model_" + tag + ".json";
  save_vae(out.selection.best, out.model_path);

  nlohmann::json log;
  log["schema"] = "coil-vae-training/1";
  log["config_hash"] = config_hash(config);
  log["seed"] = config.seed;
  log["constraint"] = to_string(dataset.constraint);
  log["dimension"] = dataset.dimension;
  log["best_index"] = out.selection.best_index;
  log["best_loss"] = out.selection.best.final_loss;
  log["repeat_losses"] = out.selection.repeat_losses;
  log["repeat_seeds"] = out.selection.repeat_seeds;
  out.log_path = dir + "/model_" + tag + ".train.json";
  write_text_file(out.log_path, log.dump(2) + "\n");
  return out;
}

struct OptimizeOutput {
  std::string trace_path;
  std::string summary_path;
  OptimizeResult result;
};

inline OptimizeOutput cmd_optimize(const RunConfig& config,
                                   const std::string& model_path,
                                   bool direct_representation,
                                   const std::string& out_dir) {
  const std::string dir = detail::ensure_dir(out_dir);
  const ProblemSpec& spec = config.problem;
  spec.validate();

  OptimizeOutput out;
  const std::string representation = direct_representation ? "direct"
                                                           : "latent";
  if (direct_representation) {
    out.result = optimize_direct(spec, config.ga_optimize, config.seed);
  } else {
    const VaeModel model = load_vae(model_path);
    out.result = optimize_latent(model, spec, config.ga_optimize, config.seed);
  }

  const std::string tag = detail::cell_tag(spec.constraint, spec.dimension);
  out.trace_path = dir + "/trace_" + representation + "_" + tag + ".csv";
  std::ostringstream trace;
  write_optimize_trace_csv(trace, out.result.trace, representation,
                           spec.constraint, spec.dimension, config.seed);
  write_text_file(out.trace_path, trace.str());

  nlohmann::json summary;
  summary["schema"] = "coil-optimize-summary/1";
  summary["config_hash"] = config_hash(config);
  summary["seed"] = config.seed;
  summary["representation"] = representation;
  summary["constraint"] = to_string(spec.constraint);
  summary["dimension"] = spec.dimension;
  summary["ga"] = detail::ga_to_json(config.ga_optimize);
  summary["generations_run"] = out.result.generations_run;
  summary["final"] = {
      {"violation", out.result.best_criteria.violation},
      {"objective_value", out.result.best_criteria.objective_value},
      {"objective_error", out.result.best_objective_error},
      {"phenotype", out.result.best_phenotype.vars},
  };
  out.summary_path = dir + "/summary_" + representation + "_" + tag + ".json";
  write_text_file(out.summary_path, summary.dump(2) + "\n");
  return out;
}

struct ExperimentOutput {
  std::string summary_csv_path;
  std::string repeats_csv_path;
  std::string meta_path;
  ExperimentResult result;
};

inline ExperimentOutput cmd_experiment(const RunConfig& config, int repeats,
                                       int workers,
                                       const std::string& out_dir) {
  const std::string dir = detail::ensure_dir(out_dir);
  ExperimentOutput out;
  out.result = run_experiment(config, repeats, workers);

  std::ostringstream summary;
  summary << "constraint,dimension,representation,repeats,"
             "mean_final_violation,se_final_violation,median_final_violation,"
             "mean_final_objective_error,se_final_objective_error,"
             "median_final_objective_error,mean_abs_objective_error,"
             "se_abs_objective_error\n";
  std::ostringstream raw;
  raw << "constraint,dimension,representation,repeat,seed,final_violation,"
         "final_objective_error,final_objective_value\n";
  for (const auto& cell : out.result.cells) {
    if (!cell.ok) continue;
    auto arm_row = [&](const char* representation, const ArmSummary& s) {
      summary << to_string(cell.constraint) << ',' << cell.dimension << ','
              << representation << ',' << s.n << ','
              << format_double(s.mean_violation) << ','
              << format_double(s.se_violation) << ','
              << format_double(s.median_violation) << ','
              << format_double(s.mean_error) << ','
              << format_double(s.se_error) << ','
              << format_double(s.median_error) << ','
              << format_double(s.mean_abs_error) << ','
              << format_double(s.se_abs_error) << '\n';
    };
    arm_row("latent", cell.latent_summary);
    arm_row("direct", cell.direct_summary);
    auto raw_rows = [&](const char* representation,
                        const std::vector<RepeatOutcome>& arm) {
      for (const auto& o : arm)
        raw << to_string(cell.constraint) << ',' << cell.dimension << ','
            << representation << ',' << o.repeat << ',' << o.seed << ','
            << format_double(o.final_violation) << ','
            << format_double(o.final_objective_error) << ','
            << format_double(o.final_objective_value) << '\n';
    };
    raw_rows("latent", cell.latent);
    raw_rows("direct", cell.direct);
  }
  out.summary_csv_path = dir + "/experiment_summary.csv";
  out.repeats_csv_path = dir + "/experiment_repeats.csv";
  write_text_file(out.summary_csv_path, summary.str());
  write_text_file(out.repeats_csv_path, raw.str());

  nlohmann::json meta;
  meta["schema"] = "coil-experiment-meta/1";
  meta["config_hash"] = config_hash(config);
  meta["seed"] = config.seed;
  meta["repeats"] = repeats;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& cell : out.result.cells)
    if (!cell.ok)
      failures.push_back({{"constraint", to_string(cell.constraint)},
                          {"dimension", cell.dimension},
                          {"error", cell.error}});
  meta["failed_cells"] = failures;
  out.meta_path = dir + "/experiment_summary.meta.json";
  write_text_file(out.meta_path, meta.dump(2) + "\n");
  return out;
}

struct SweepOutput {
  std::string csv_path;
  std::string meta_path;
  SweepTable table;
};

inline SweepOutput cmd_sweep(const RunConfig& config,
                             const std::string& model_path, int sweep_dim,
                             int grid_points, const std::string& out_dir) {
  const std::string dir = detail::ensure_dir(out_dir);
  const VaeModel model = load_vae(model_path);
  const ProblemSpec& spec = config.problem;

  SweepOutput out;
  out.table = latent_sweep(model, spec, sweep_dim, grid_points);
  const std::string tag = detail::cell_tag(spec.constraint, spec.dimension);
  out.csv_path =
      dir + "/sweep_" + tag + "_z" + std::to_string(sweep_dim) + ".csv";
  std::ostringstream csv;
  write_sweep_csv(csv, out.table);
  write_text_file(out.csv_path, csv.str());

  nlohmann::json meta;
  meta["schema"] = "coil-sweep-meta/1";
  meta["config_hash"] = config_hash(config);
  meta["seed"] = config.seed;
  meta["constraint"] = to_string(spec.constraint);
  meta["dimension"] = spec.dimension;
  meta["sweep_dim"] = sweep_dim;
  meta["grid_points"] = grid_points;
  if (spec.constraint == ConstraintKind::C1)
    meta["fraction_in_45_50"] = sweep_fraction_within(out.table, 45.0, 50.0);
  out.meta_path = detail::meta_path_for(out.csv_path);
  write_text_file(out.meta_path, meta.dump(2) + "\n");
  return out;
}

struct TimingOutput {
  std::string report_path;
  TimingReport report;
};

inline TimingOutput cmd_timing(const RunConfig& config,
                               const std::string& model_path, int runs,
                               const std::string& out_dir) {
  const std::string dir = detail::ensure_dir(out_dir);
  const VaeModel model = load_vae(model_path);
  const ProblemSpec& spec = config.problem;
  spec.validate();

  TimingOutput out;
  out.report = run_timing(model, spec, config.ga_optimize, runs, config.seed);

  nlohmann::json j;
  j["schema"] = "coil-timing/1";
  j["config_hash"] = config_hash(config);
  j["seed"] = config.seed;
  j["constraint"] = to_string(spec.constraint);
  j["dimension"] = spec.dimension;
  j["runs"] = out.report.runs;
  j["latent_seconds"] = out.report.latent_seconds;
  j["direct_seconds"] = out.report.direct_seconds;
  j["ratio"] = out.report.ratio;
  const std::string tag = detail::cell_tag(spec.constraint, spec.dimension);
  out.report_path = dir + "/timing_" + tag + ".json";
  write_text_file(out.report_path, j.dump(2) + "\n");
  return out;
}

}  // namespace coil

#endif
