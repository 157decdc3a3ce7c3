#ifndef COIL_GA_HPP
#define COIL_GA_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "coil/core.hpp"
#include "coil/io.hpp"
#include "coil/rng.hpp"

namespace coil {

// Generational real-coded GA: tournament selection, per-pair uniform
// crossover, per-individual Gaussian mutation, full replacement without
// elitism. The best-ever individual is tracked separately for reporting.
struct GaConfig {
  int population_size = 20;
  int max_generations = 50;
  double crossover_prob = 0.05;   // gate per mating pair
  double mutation_prob = 0.2;     // gate per individual; all genes perturbed
  double mutation_mu = 0.0;
  double mutation_sigma = 1.0;
  int tournament_size = 3;
  double gene_min = kGeneMin;
  double gene_max = kGeneMax;
  double uniform_swap_prob = 0.5;  // per-gene swap within a gated pair

  void validate() const {
    if (population_size < 1 || max_generations < 1 || tournament_size < 1)
      throw std::invalid_argument("GA sizes must be >= 1");
    auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!is_prob(crossover_prob) || !is_prob(mutation_prob) ||
        !is_prob(uniform_swap_prob))
      throw std::invalid_argument("GA probabilities must lie in [0, 1]");
    if (!(gene_min < gene_max))
      throw std::invalid_argument("gene bounds must satisfy min < max");
  }
};

// Both criteria are minimized.
struct CriterionVector {
  double objective_value = 0.0;
  double violation = 0.0;
};

// Constraint-first ordering used to pick the reported individual; a
// population-relative fitness is no good as a final-answer criterion.
inline bool lexicographic_better(const CriterionVector& a,
                                 const CriterionVector& b) {
  if (a.violation != b.violation) return a.violation < b.violation;
  return a.objective_value < b.objective_value;
}

struct Individual {
  Genotype genotype;
  CriterionVector criteria;
  double objective_error = 0.0;
  double selection_cost = 0.0;  // lower is better; set by the evaluator
};

using Population = std::vector<Individual>;

struct GenerationRecord {
  int generation = 0;
  double best_violation = 0.0;        // best-ever individual, constraint-first
  double mean_violation = 0.0;        // current population mean
  double best_objective_error = 0.0;  // best-ever individual
  double mean_objective_error = 0.0;  // current population mean
  Genotype best_genotype;
};

struct EvolutionTrace {
  std::vector<GenerationRecord> records;
};

// CSV schema: generation,best_violation,mean_violation,best_objective_error,
// mean_objective_error. best_* columns follow the best-ever individual, so
// best_violation is monotone non-increasing down the file.
inline void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  out << "generation,best_violation,mean_violation,best_objective_error,"
         "mean_objective_error\n";
  for (const auto& rec : trace.records) {
    out << rec.generation << ',' << format_double(rec.best_violation) << ','
        << format_double(rec.mean_violation) << ','
        << format_double(rec.best_objective_error) << ','
        << format_double(rec.mean_objective_error) << '\n';
  }
}

struct TerminationRule {
  // Stop once the best-ever violation reaches this value (checked after
  // every evaluation); otherwise run to max_generations.
  std::optional<double> violation_target;
};

struct EvolveResult {
  Individual best;  // best-ever, constraint-first ordering
  EvolutionTrace trace;
  int generations_run = 0;
};

inline Genotype random_genotype(int dimension, double lo, double hi,
                                Rng& rng) {
  Genotype g;
  g.genes.reserve(dimension);
  for (int i = 0; i < dimension; ++i) g.genes.push_back(rng.uniform(lo, hi));
  return g;
}

// Per-gene swap with probability swap_prob; gene values only move between
// the parents, so bounds are preserved.
inline void uniform_crossover(Genotype& a, Genotype& b, double swap_prob,
                              Rng& rng) {
  if (a.size() != b.size())
    throw std::invalid_argument("crossover requires equal genotype lengths");
  for (std::size_t i = 0; i < a.genes.size(); ++i)
    if (rng.uniform01() < swap_prob) std::swap(a.genes[i], b.genes[i]);
}

// Adds N(mu, sigma^2) noise to every gene, then clips to [lo, hi].
inline void gaussian_mutation(Genotype& g, double mu, double sigma, double lo,
                              double hi, Rng& rng) {
  for (double& gene : g.genes)
    gene = std::clamp(gene + rng.normal(mu, sigma), lo, hi);
}

// Best of k individuals drawn uniformly with replacement; ties go to the
// earliest draw. Costs are minimized.
inline std::size_t tournament_select_index(const std::vector<double>& costs,
                                           int k, Rng& rng) {
  if (costs.empty()) throw std::invalid_argument("empty population");
  std::size_t best = rng.uniform_index(costs.size());
  for (int i = 1; i < k; ++i) {
    const std::size_t candidate = rng.uniform_index(costs.size());
    if (costs[candidate] < costs[best]) best = candidate;
  }
  return best;
}

using GenerationObserver =
    std::function<void(int generation, const Population&)>;

// Evaluator contract: fill criteria, objective_error and selection_cost for
// every individual; it may draw from rng (population-relative scoring does).
// RNG draw order per generation is fixed: evaluation, selection, crossover
// gates, mutation gates, so a seed pins the whole run.
template <typename Evaluator>
EvolveResult evolve(const GaConfig& config, int dimension,
                    Evaluator&& evaluate, Rng& rng,
                    TerminationRule termination = {},
                    const GenerationObserver& observer = {}) {
  config.validate();
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");

  Population pop(config.population_size);
  for (auto& ind : pop)
    ind.genotype =
        random_genotype(dimension, config.gene_min, config.gene_max, rng);
  evaluate(pop, rng);
  if (observer) observer(0, pop);

  EvolveResult result;
  result.best = *std::min_element(
      pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
        return lexicographic_better(a.criteria, b.criteria);
      });

  auto target_met = [&] {
    return termination.violation_target &&
           result.best.criteria.violation <= *termination.violation_target;
  };

  std::vector<double> costs(pop.size());
  for (int gen = 1; gen <= config.max_generations && !target_met(); ++gen) {
    for (std::size_t i = 0; i < pop.size(); ++i)
      costs[i] = pop[i].selection_cost;

    Population offspring;
    offspring.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
      offspring.push_back(
          pop[tournament_select_index(costs, config.tournament_size, rng)]);

    for (std::size_t i = 0; i + 1 < offspring.size(); i += 2)
      if (rng.uniform01() < config.crossover_prob)
        uniform_crossover(offspring[i].genotype, offspring[i + 1].genotype,
                          config.uniform_swap_prob, rng);

    for (auto& ind : offspring)
      if (rng.uniform01() < config.mutation_prob)
        gaussian_mutation(ind.genotype, config.mutation_mu,
                          config.mutation_sigma, config.gene_min,
                          config.gene_max, rng);

    pop = std::move(offspring);
    evaluate(pop, rng);
    result.generations_run = gen;

    double violation_sum = 0.0;
    double error_sum = 0.0;
    for (const auto& ind : pop) {
      violation_sum += ind.criteria.violation;
      error_sum += ind.objective_error;
      if (lexicographic_better(ind.criteria, result.best.criteria))
        result.best = ind;
    }

    GenerationRecord rec;
    rec.generation = gen;
    rec.best_violation = result.best.criteria.violation;
    rec.best_objective_error = result.best.objective_error;
    rec.mean_violation = violation_sum / static_cast<double>(pop.size());
    rec.mean_objective_error = error_sum / static_cast<double>(pop.size());
    rec.best_genotype = result.best.genotype;
    result.trace.records.push_back(std::move(rec));

    if (observer) observer(gen, pop);
  }
  return result;
}

}  // namespace coil

#endif
