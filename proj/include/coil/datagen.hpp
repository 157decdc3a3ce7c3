#ifndef COIL_DATAGEN_HPP
#define COIL_DATAGEN_HPP

#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "coil/constraints.hpp"
#include "coil/core.hpp"
#include "coil/ga.hpp"
#include "coil/io.hpp"

namespace coil {

struct generation_error : std::runtime_error {
  std::size_t rows_collected;
  generation_error(const std::string& what, std::size_t rows)
      : std::runtime_error(what), rows_collected(rows) {}
};

struct DatagenStats {
  long restarts_run = 0;
  long restarts_contributing = 0;
  long candidates_seen = 0;
  long duplicates_rejected = 0;
  long samples_rejected = 0;   // sampler only
  double acceptance_rate = 0;  // sampler only
};

// Feasible-phenotype training set: every row has violation exactly 0 under
// its constraint, rows deduplicated to componentwise distance > tolerance.
struct Dataset {
  ConstraintKind constraint = ConstraintKind::C1;
  int dimension = 1;
  std::vector<std::vector<double>> rows;
  std::uint64_t seed = 0;
  std::string method;  // "ga" or "sampler"
  DatagenStats stats;
};

struct DatagenOptions {
  std::size_t target_size = 5000;
  double dedup_tolerance = 1e-6;
  int restart_cap_divisor = 20;   // per-restart harvest cap = target / this
  int restart_budget_factor = 10; // restart budget = factor * target / pop
};

namespace detail {

inline bool rows_match(const std::vector<double>& a,
                       const std::vector<double>& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

inline bool is_duplicate(const std::vector<std::vector<double>>& rows,
                         const std::vector<double>& candidate, double tol) {
  for (const auto& row : rows)
    if (rows_match(row, candidate, tol)) return true;
  return false;
}

}  // namespace detail

// Scalar-violation evaluator for the data-generation GA: selection cost is
// the constraint violation alone, the objective is carried for tracing only.
inline auto make_violation_evaluator(const ProblemSpec& spec) {
  const double f_star = constrained_optimum(spec).f;
  return [spec, f_star](Population& pop, Rng&) {
    for (auto& ind : pop) {
      const Phenotype x = genotype_to_phenotype(ind.genotype, spec);
      ind.criteria.objective_value = objective(x);
      ind.criteria.violation = violation(spec, x);
      ind.objective_error = ind.criteria.objective_value - f_star;
      ind.selection_cost = ind.criteria.violation;
    }
  };
}

// Harvest-based generation: GA restarts from fresh random populations with
// violation-only fitness, collecting every zero-violation individual seen in
// any generation. Each restart contributes at most target/cap_divisor rows
// so the dataset draws from many independent populations. Runs go the full
// generation budget; stopping at the first zero would leave each restart
// with only a handful of usable rows.
inline Dataset generate_dataset_ga(const ProblemSpec& spec,
                                   const GaConfig& ga, std::uint64_t seed,
                                   const DatagenOptions& options = {}) {
  spec.validate();
  ga.validate();
  Dataset dataset;
  dataset.constraint = spec.constraint;
  dataset.dimension = spec.dimension;
  dataset.seed = seed;
  dataset.method = "ga";
  dataset.rows.reserve(options.target_size);

  const std::size_t cap = std::max<std::size_t>(
      1, options.target_size / static_cast<std::size_t>(
                                   std::max(1, options.restart_cap_divisor)));
  const long budget = std::max<long>(
      1, static_cast<long>(options.restart_budget_factor) *
             static_cast<long>(options.target_size) / ga.population_size);

  auto evaluator = make_violation_evaluator(spec);
  for (long restart = 0;
       restart < budget && dataset.rows.size() < options.target_size;
       ++restart) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
    std::size_t harvested = 0;
    auto harvest = [&](int, const Population& pop) {
      for (const auto& ind : pop) {
        if (harvested >= cap || dataset.rows.size() >= options.target_size)
          return;
        if (ind.criteria.violation != 0.0) continue;
        ++dataset.stats.candidates_seen;
        const Phenotype x = genotype_to_phenotype(ind.genotype, spec);
        if (detail::is_duplicate(dataset.rows, x.vars,
                                 options.dedup_tolerance)) {
          ++dataset.stats.duplicates_rejected;
          continue;
        }
        dataset.rows.push_back(x.vars);
        ++harvested;
      }
    };
    evolve(ga, spec.dimension, evaluator, rng, TerminationRule{}, harvest);
    ++dataset.stats.restarts_run;
    if (harvested > 0) ++dataset.stats.restarts_contributing;
  }

  if (dataset.rows.size() < options.target_size)
    throw generation_error(
        "restart budget exhausted at " + std::to_string(dataset.rows.size()) +
            " of " + std::to_string(options.target_size) + " rows",
        dataset.rows.size());
  return dataset;
}

// Constructive generation for the chained-inequality constraint.
inline Dataset generate_dataset_sampler(const ProblemSpec& spec,
                                        std::uint64_t seed,
                                        const DatagenOptions& options = {}) {
  spec.validate();
  if (spec.constraint != ConstraintKind::C2)
    throw std::invalid_argument("sampler generation is for C2");
  Dataset dataset;
  dataset.constraint = spec.constraint;
  dataset.dimension = spec.dimension;
  dataset.seed = seed;
  dataset.method = "sampler";
  dataset.rows.reserve(options.target_size);

  Rng rng(seed);
  long attempts = 0;
  while (dataset.rows.size() < options.target_size) {
    ++attempts;
    auto sample =
        sample_c2(spec.dimension, rng, spec.var_min, spec.var_max);
    if (!sample) {
      ++dataset.stats.samples_rejected;
      continue;
    }
    if (detail::is_duplicate(dataset.rows, sample->vars,
                             options.dedup_tolerance)) {
      ++dataset.stats.duplicates_rejected;
      continue;
    }
    dataset.rows.push_back(std::move(sample->vars));
  }
  dataset.stats.acceptance_rate =
      static_cast<double>(dataset.rows.size()) / static_cast<double>(attempts);
  return dataset;
}

struct NoveltyReport {
  double min_distance = 0.0;
  std::size_t rows_within = 0;
  std::size_t nearest_index = 0;
};

// Distance audit of a dataset against the known optimum: did random feasible
// sampling stumble on (near-)optimal rows?
inline NoveltyReport audit_novelty(const Dataset& dataset, const Phenotype& x,
                                   double tol) {
  if (dataset.rows.empty()) throw std::invalid_argument("empty dataset");
  NoveltyReport report;
  report.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    double sq = 0.0;
    for (std::size_t i = 0; i < dataset.rows[r].size(); ++i) {
      const double diff = dataset.rows[r][i] - x.vars[i];
      sq += diff * diff;
    }
    const double dist = std::sqrt(sq);
    if (dist < report.min_distance) {
      report.min_distance = dist;
      report.nearest_index = r;
    }
    if (dist <= tol) ++report.rows_within;
  }
  return report;
}

inline constexpr const char* kDatasetMetaSchema = "coil-dataset-meta/1";

inline nlohmann::json dataset_meta_to_json(const Dataset& dataset,
                                           const std::string& config_hash) {
  nlohmann::json j;
  j["schema"] = kDatasetMetaSchema;
  j["constraint"] = to_string(dataset.constraint);
  j["dimension"] = dataset.dimension;
  j["rows"] = dataset.rows.size();
  j["seed"] = dataset.seed;
  j["method"] = dataset.method;
  j["config_hash"] = config_hash;
  j["stats"] = {
      {"restarts_run", dataset.stats.restarts_run},
      {"restarts_contributing", dataset.stats.restarts_contributing},
      {"candidates_seen", dataset.stats.candidates_seen},
      {"duplicates_rejected", dataset.stats.duplicates_rejected},
      {"samples_rejected", dataset.stats.samples_rejected},
      {"acceptance_rate", dataset.stats.acceptance_rate},
  };
  return j;
}

inline CsvTable dataset_to_csv(const Dataset& dataset) {
  CsvTable table;
  for (int i = 0; i < dataset.dimension; ++i)
    table.header.push_back("x" + std::to_string(i));
  table.rows = dataset.rows;
  return table;
}

inline void save_dataset(const Dataset& dataset, const std::string& csv_path,
                         const std::string& meta_path,
                         const std::string& config_hash = "") {
  write_csv_file(csv_path, dataset_to_csv(dataset));
  write_text_file(meta_path,
                  dataset_meta_to_json(dataset, config_hash).dump(2) + "\n");
}

inline Dataset load_dataset(const std::string& csv_path,
                            const std::string& meta_path) {
  const auto meta = nlohmann::json::parse(read_text_file(meta_path));
  if (meta.at("schema").get<std::string>() != kDatasetMetaSchema)
    throw std::invalid_argument("unsupported dataset meta schema");
  Dataset dataset;
  dataset.constraint =
      constraint_from_string(meta.at("constraint").get<std::string>());
  dataset.dimension = meta.at("dimension").get<int>();
  dataset.seed = meta.at("seed").get<std::uint64_t>();
  dataset.method = meta.at("method").get<std::string>();
  const auto& stats = meta.at("stats");
  dataset.stats.restarts_run = stats.at("restarts_run").get<long>();
  dataset.stats.restarts_contributing =
      stats.at("restarts_contributing").get<long>();
  dataset.stats.candidates_seen = stats.at("candidates_seen").get<long>();
  dataset.stats.duplicates_rejected =
      stats.at("duplicates_rejected").get<long>();
  dataset.stats.samples_rejected = stats.at("samples_rejected").get<long>();
  dataset.stats.acceptance_rate = stats.at("acceptance_rate").get<double>();

  const CsvTable table = read_csv_file(csv_path);
  if (static_cast<int>(table.header.size()) != dataset.dimension)
    throw std::invalid_argument("dataset column count mismatch");
  dataset.rows = table.rows;
  if (dataset.rows.size() != meta.at("rows").get<std::size_t>())
    throw std::invalid_argument("dataset row count mismatch");
  return dataset;
}

}  // namespace coil

#endif
