#ifndef COIL_CONFIG_HPP
#define COIL_CONFIG_HPP

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "coil/core.hpp"
#include "coil/datagen.hpp"
#include "coil/ga.hpp"
#include "coil/io.hpp"
#include "coil/vae.hpp"

namespace coil {

struct ExperimentSettings {
  std::vector<ConstraintKind> constraints = {ConstraintKind::C1,
                                             ConstraintKind::C2};
  std::vector<int> dimensions = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int repeats = 100;
  bool retrain_per_repeat = false;  // ablation: fresh VAE for every repeat
};

// One JSON file drives every command: problem, GA settings for both stages,
// VAE settings, dataset policy, experiment grid and the master seed.
struct RunConfig {
  ProblemSpec problem;
  GaConfig ga_datagen{.population_size = 200, .max_generations = 200};
  GaConfig ga_optimize{.population_size = 20, .max_generations = 50};
  int vae_hidden_dim = 32;
  TrainConfig vae_train;
  DatagenOptions dataset;
  ExperimentSettings experiment;
  std::uint64_t seed = 1;

  VaeArchitecture vae_architecture(int dimension) const {
    return VaeArchitecture{dimension, dimension, vae_hidden_dim};
  }
};

namespace detail {

inline nlohmann::json ga_to_json(const GaConfig& ga) {
  return {{"population_size", ga.population_size},
          {"max_generations", ga.max_generations},
          {"crossover_prob", ga.crossover_prob},
          {"mutation_prob", ga.mutation_prob},
          {"mutation_mu", ga.mutation_mu},
          {"mutation_sigma", ga.mutation_sigma},
          {"tournament_size", ga.tournament_size},
          {"uniform_swap_prob", ga.uniform_swap_prob}};
}

inline GaConfig ga_from_json(const nlohmann::json& j, GaConfig defaults) {
  defaults.population_size =
      j.value("population_size", defaults.population_size);
  defaults.max_generations =
      j.value("max_generations", defaults.max_generations);
  defaults.crossover_prob = j.value("crossover_prob", defaults.crossover_prob);
  defaults.mutation_prob = j.value("mutation_prob", defaults.mutation_prob);
  defaults.mutation_mu = j.value("mutation_mu", defaults.mutation_mu);
  defaults.mutation_sigma = j.value("mutation_sigma", defaults.mutation_sigma);
  defaults.tournament_size =
      j.value("tournament_size", defaults.tournament_size);
  defaults.uniform_swap_prob =
      j.value("uniform_swap_prob", defaults.uniform_swap_prob);
  return defaults;
}

}  // namespace detail

inline nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json j;
  j["problem"] = {{"constraint", to_string(config.problem.constraint)},
                  {"dimension", config.problem.dimension},
                  {"var_min", config.problem.var_min},
                  {"var_max", config.problem.var_max}};
  j["ga_datagen"] = detail::ga_to_json(config.ga_datagen);
  j["ga_optimize"] = detail::ga_to_json(config.ga_optimize);
  j["vae"] = {{"hidden_dim", config.vae_hidden_dim},
              {"epochs", config.vae_train.epochs},
              {"learning_rate", config.vae_train.learning_rate},
              {"kld_weight", config.vae_train.kld_weight},
              {"batch_size", config.vae_train.batch_size},
              {"repeats", config.vae_train.repeats}};
  j["dataset"] = {{"target_size", config.dataset.target_size},
                  {"dedup_tolerance", config.dataset.dedup_tolerance},
                  {"restart_cap_divisor", config.dataset.restart_cap_divisor},
                  {"restart_budget_factor",
                   config.dataset.restart_budget_factor}};
  nlohmann::json constraints = nlohmann::json::array();
  for (auto kind : config.experiment.constraints)
    constraints.push_back(to_string(kind));
  j["experiment"] = {{"constraints", constraints},
                     {"dimensions", config.experiment.dimensions},
                     {"repeats", config.experiment.repeats},
                     {"retrain_per_repeat",
                      config.experiment.retrain_per_repeat}};
  j["seed"] = config.seed;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig config;
  if (j.contains("problem")) {
    const auto& p = j["problem"];
    if (p.contains("constraint"))
      config.problem.constraint =
          constraint_from_string(p["constraint"].get<std::string>());
    config.problem.dimension =
        p.value("dimension", config.problem.dimension);
    config.problem.var_min = p.value("var_min", config.problem.var_min);
    config.problem.var_max = p.value("var_max", config.problem.var_max);
  }
  if (j.contains("ga_datagen"))
    config.ga_datagen = detail::ga_from_json(j["ga_datagen"],
                                             config.ga_datagen);
  if (j.contains("ga_optimize"))
    config.ga_optimize =
        detail::ga_from_json(j["ga_optimize"], config.ga_optimize);
  if (j.contains("vae")) {
    const auto& v = j["vae"];
    config.vae_hidden_dim = v.value("hidden_dim", config.vae_hidden_dim);
    config.vae_train.epochs = v.value("epochs", config.vae_train.epochs);
    config.vae_train.learning_rate =
        v.value("learning_rate", config.vae_train.learning_rate);
    config.vae_train.kld_weight =
        v.value("kld_weight", config.vae_train.kld_weight);
    config.vae_train.batch_size =
        v.value("batch_size", config.vae_train.batch_size);
    config.vae_train.repeats = v.value("repeats", config.vae_train.repeats);
  }
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    config.dataset.target_size =
        d.value("target_size", config.dataset.target_size);
    config.dataset.dedup_tolerance =
        d.value("dedup_tolerance", config.dataset.dedup_tolerance);
    config.dataset.restart_cap_divisor =
        d.value("restart_cap_divisor", config.dataset.restart_cap_divisor);
    config.dataset.restart_budget_factor =
        d.value("restart_budget_factor",
                config.dataset.restart_budget_factor);
  }
  if (j.contains("experiment")) {
    const auto& e = j["experiment"];
    if (e.contains("constraints")) {
      config.experiment.constraints.clear();
      for (const auto& name : e["constraints"])
        config.experiment.constraints.push_back(
            constraint_from_string(name.get<std::string>()));
    }
    if (e.contains("dimensions"))
      config.experiment.dimensions =
          e["dimensions"].get<std::vector<int>>();
    config.experiment.repeats =
        e.value("repeats", config.experiment.repeats);
    config.experiment.retrain_per_repeat = e.value(
        "retrain_per_repeat", config.experiment.retrain_per_repeat);
  }
  config.seed = j.value("seed", config.seed);
  return config;
}

inline RunConfig load_config(const std::string& path) {
  return config_from_json(nlohmann::json::parse(read_text_file(path)));
}

// Stable fingerprint of the effective configuration, stamped into every
// artifact's metadata.
inline std::string config_hash(const RunConfig& config) {
  return hex64(fnv1a64(config_to_json(config).dump()));
}

}  // namespace coil

#endif
