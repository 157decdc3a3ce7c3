#ifndef COIL_EXPERIMENT_HPP
#define COIL_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "coil/config.hpp"
#include "coil/datagen.hpp"
#include "coil/optimize.hpp"
#include "coil/vae.hpp"

namespace coil {

namespace detail {

// Work items are pure functions of their index, so results are identical for
// any worker count.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
      fn(i);
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(workers, static_cast<int>(n));
  pool.reserve(count - 1);
  for (int t = 1; t < count; ++t) pool.emplace_back(drain);
  drain();
  for (auto& thread : pool) thread.join();
}

}  // namespace detail

inline MatrixXd dataset_to_training_matrix(const Dataset& dataset,
                                           const ProblemSpec& spec) {
  MatrixXd data(dataset.dimension, dataset.rows.size());
  for (std::size_t c = 0; c < dataset.rows.size(); ++c)
    data.col(c) = normalize_for_vae(Phenotype{dataset.rows[c]}, spec);
  return data;
}

struct RepeatOutcome {
  int repeat = 0;
  std::uint64_t seed = 0;
  double final_violation = 0.0;
  double final_objective_error = 0.0;
  double final_objective_value = 0.0;
};

struct ArmSummary {
  int n = 0;
  double mean_violation = 0.0, se_violation = 0.0, median_violation = 0.0;
  double mean_error = 0.0, se_error = 0.0, median_error = 0.0;
  double mean_abs_error = 0.0, se_abs_error = 0.0;
};

inline ArmSummary summarize_outcomes(const std::vector<RepeatOutcome>& arm) {
  ArmSummary s;
  s.n = static_cast<int>(arm.size());
  if (arm.empty()) return s;
  auto stats = [&](auto&& get, double& mean, double& se) {
    double sum = 0.0;
    for (const auto& o : arm) sum += get(o);
    mean = sum / arm.size();
    if (arm.size() > 1) {
      double sq = 0.0;
      for (const auto& o : arm) sq += (get(o) - mean) * (get(o) - mean);
      se = std::sqrt(sq / (arm.size() - 1)) / std::sqrt(double(arm.size()));
    }
  };
  auto median = [&](auto&& get) {
    std::vector<double> values;
    values.reserve(arm.size());
    for (const auto& o : arm) values.push_back(get(o));
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid]
                             : 0.5 * (values[mid - 1] + values[mid]);
  };
  auto get_violation = [](const RepeatOutcome& o) { return o.final_violation; };
  auto get_error = [](const RepeatOutcome& o) {
    return o.final_objective_error;
  };
  auto get_abs_error = [](const RepeatOutcome& o) {
    return std::abs(o.final_objective_error);
  };
  stats(get_violation, s.mean_violation, s.se_violation);
  stats(get_error, s.mean_error, s.se_error);
  stats(get_abs_error, s.mean_abs_error, s.se_abs_error);
  s.median_violation = median(get_violation);
  s.median_error = median(get_error);
  return s;
}

struct CellResult {
  ConstraintKind constraint = ConstraintKind::C1;
  int dimension = 0;
  bool ok = false;
  std::string error;
  DatagenStats dataset_stats;
  double vae_loss = 0.0;
  std::vector<double> vae_repeat_losses;
  std::vector<RepeatOutcome> latent;
  std::vector<RepeatOutcome> direct;
  ArmSummary latent_summary;
  ArmSummary direct_summary;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
};

// Child-seed layout below the per-cell seed; every stage and repeat draws
// from its own derived stream.
namespace seed_tag {
constexpr std::uint64_t dataset = 1;
constexpr std::uint64_t vae = 2;
constexpr std::uint64_t latent_arm = 3;
constexpr std::uint64_t direct_arm = 4;
}  // namespace seed_tag

// Full grid protocol: per (constraint, D) cell build one dataset, select one
// VAE (lowest loss of the configured repeats), then run the same GA once per
// repeat on the latent and on the direct representation. One default VAE is
// reused across all repeats of a cell; retrain_per_repeat trains a fresh one
// per repeat instead.
inline ExperimentResult run_experiment(
    const RunConfig& config, int repeats, int workers = 1,
    const std::function<void(const CellResult&)>& on_cell = {}) {
  ExperimentResult result;
  std::uint64_t cell_index = 0;
  for (auto constraint : config.experiment.constraints) {
    for (int dimension : config.experiment.dimensions) {
      CellResult cell;
      cell.constraint = constraint;
      cell.dimension = dimension;
      const std::uint64_t cell_seed = derive_seed(config.seed, cell_index++);

      ProblemSpec spec{dimension, constraint, config.problem.var_min,
                       config.problem.var_max};
      try {
        spec.validate();
        Dataset dataset =
            constraint == ConstraintKind::C1
                ? generate_dataset_ga(spec, config.ga_datagen,
                                      derive_seed(cell_seed, seed_tag::dataset),
                                      config.dataset)
                : generate_dataset_sampler(
                      spec, derive_seed(cell_seed, seed_tag::dataset),
                      config.dataset);
        cell.dataset_stats = dataset.stats;

        const MatrixXd data = dataset_to_training_matrix(dataset, spec);
        const VaeArchitecture arch = config.vae_architecture(dimension);
        VaeModel model;
        if (!config.experiment.retrain_per_repeat) {
          TrainSelection selection =
              train_select_best(data, arch, config.vae_train,
                                derive_seed(cell_seed, seed_tag::vae));
          cell.vae_loss = selection.best.final_loss;
          cell.vae_repeat_losses = selection.repeat_losses;
          model = std::move(selection.best);
        }

        const std::uint64_t latent_base =
            derive_seed(cell_seed, seed_tag::latent_arm);
        const std::uint64_t direct_base =
            derive_seed(cell_seed, seed_tag::direct_arm);
        cell.latent.resize(repeats);
        cell.direct.resize(repeats);

        detail::parallel_for(
            static_cast<std::size_t>(repeats) * 2, workers, [&](std::size_t i) {
              const bool is_latent = i < static_cast<std::size_t>(repeats);
              const int r = static_cast<int>(
                  is_latent ? i : i - static_cast<std::size_t>(repeats));
              RepeatOutcome outcome;
              outcome.repeat = r;
              if (is_latent) {
                outcome.seed = derive_seed(latent_base, r);
                const VaeModel* use = &model;
                VaeModel own;
                if (config.experiment.retrain_per_repeat) {
                  own = train_select_best(
                            data, arch, config.vae_train,
                            derive_seed(derive_seed(cell_seed, seed_tag::vae),
                                        r))
                            .best;
                  use = &own;
                }
                const OptimizeResult run = optimize_latent(
                    *use, spec, config.ga_optimize, outcome.seed);
                outcome.final_violation = run.best_criteria.violation;
                outcome.final_objective_error = run.best_objective_error;
                outcome.final_objective_value =
                    run.best_criteria.objective_value;
                cell.latent[r] = outcome;
              } else {
                outcome.seed = derive_seed(direct_base, r);
                const OptimizeResult run =
                    optimize_direct(spec, config.ga_optimize, outcome.seed);
                outcome.final_violation = run.best_criteria.violation;
                outcome.final_objective_error = run.best_objective_error;
                outcome.final_objective_value =
                    run.best_criteria.objective_value;
                cell.direct[r] = outcome;
              }
            });

        cell.latent_summary = summarize_outcomes(cell.latent);
        cell.direct_summary = summarize_outcomes(cell.direct);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
      if (on_cell) on_cell(cell);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

struct TimingReport {
  int runs = 0;
  double latent_seconds = 0.0;
  double direct_seconds = 0.0;
  double ratio = 0.0;
};

// Sequential, single-threaded by construction so the two arms are
// comparable.
inline TimingReport run_timing(const VaeModel& model, const ProblemSpec& spec,
                               const GaConfig& ga, int runs,
                               std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  TimingReport report;
  report.runs = runs;

  const auto latent_start = clock::now();
  for (int i = 0; i < runs; ++i)
    optimize_latent(model, spec, ga, derive_seed(seed, i));
  report.latent_seconds =
      std::chrono::duration<double>(clock::now() - latent_start).count();

  const auto direct_start = clock::now();
  for (int i = 0; i < runs; ++i)
    optimize_direct(spec, ga, derive_seed(seed, i));
  report.direct_seconds =
      std::chrono::duration<double>(clock::now() - direct_start).count();

  report.ratio = report.direct_seconds > 0.0
                     ? report.latent_seconds / report.direct_seconds
                     : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace coil

#endif
