#ifndef COIL_OPTIMIZE_HPP
#define COIL_OPTIMIZE_HPP

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "coil/constraints.hpp"
#include "coil/core.hpp"
#include "coil/ga.hpp"
#include "coil/vae.hpp"

namespace coil {

struct TournamentFitnessResult {
  std::vector<double> fitness;  // points per match played; higher is better
  std::vector<int> num_matches;
};

// Population-relative fitness over the two criteria (objective value and
// constraint violation, both minimized). For each of popsize rounds a
// competition group of group_size individuals is drawn, then matches_per_group
// pairwise matches are played inside it. Per criterion the strictly better
// side scores a point; on exact equality both score. All draws are uniform
// with replacement. Final fitness is points divided by matches played, zero
// for anyone never matched.
inline TournamentFitnessResult tournament_fitness(
    const std::vector<CriterionVector>& criteria, Rng& rng,
    int group_size = 5, int matches_per_group = 10) {
  const std::size_t n = criteria.size();
  if (n == 0) throw std::invalid_argument("empty population");
  for (const auto& c : criteria)
    if (!std::isfinite(c.objective_value) || !std::isfinite(c.violation))
      throw std::invalid_argument("tournament fitness on unevaluated criteria");

  std::vector<long> points(n, 0);
  TournamentFitnessResult result;
  result.num_matches.assign(n, 0);

  std::vector<std::size_t> group(group_size);
  for (std::size_t round = 0; round < n; ++round) {
    for (int g = 0; g < group_size; ++g) group[g] = rng.uniform_index(n);
    for (int j = 0; j < matches_per_group; ++j) {
      const std::size_t a = group[rng.uniform_index(group_size)];
      const std::size_t b = group[rng.uniform_index(group_size)];
      ++result.num_matches[a];
      ++result.num_matches[b];
      const double crit_a[2] = {criteria[a].objective_value,
                                criteria[a].violation};
      const double crit_b[2] = {criteria[b].objective_value,
                                criteria[b].violation};
      for (int e = 0; e < 2; ++e) {
        if (crit_a[e] < crit_b[e]) ++points[a];
        if (crit_b[e] < crit_a[e])
          ++points[b];
        else if (crit_b[e] == crit_a[e]) {
          ++points[a];
          ++points[b];
        }
      }
    }
  }

  result.fitness.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    result.fitness[i] = result.num_matches[i] > 0
                            ? static_cast<double>(points[i]) /
                                  result.num_matches[i]
                            : 0.0;
  return result;
}

struct OptimizeResult {
  Phenotype best_phenotype;
  CriterionVector best_criteria;
  double best_objective_error = 0.0;
  EvolutionTrace trace;
  int generations_run = 0;
};

namespace detail {

// Shared generational loop for both representations: the evaluator maps a
// genotype to a phenotype, criteria come from the objective and constraint,
// and selection runs size-k tournaments on the tournament fitness.
template <typename DecodeFn>
OptimizeResult optimize_with(const ProblemSpec& spec, const GaConfig& ga,
                             std::uint64_t seed, int genotype_dim,
                             DecodeFn&& to_phenotype) {
  spec.validate();
  const double f_star = constrained_optimum(spec).f;

  auto evaluator = [&](Population& pop, Rng& rng) {
    std::vector<CriterionVector> criteria(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const Phenotype x = to_phenotype(pop[i].genotype);
      criteria[i].objective_value = objective(x);
      criteria[i].violation = violation(spec, x);
      pop[i].criteria = criteria[i];
      pop[i].objective_error = criteria[i].objective_value - f_star;
    }
    const auto scored = tournament_fitness(criteria, rng);
    for (std::size_t i = 0; i < pop.size(); ++i)
      pop[i].selection_cost = -scored.fitness[i];
  };

  Rng rng(seed);
  EvolveResult evolved =
      evolve(ga, genotype_dim, evaluator, rng, TerminationRule{});

  OptimizeResult result;
  result.best_phenotype = to_phenotype(evolved.best.genotype);
  result.best_criteria = evolved.best.criteria;
  result.best_objective_error = evolved.best.objective_error;
  result.trace = std::move(evolved.trace);
  result.generations_run = evolved.generations_run;
  return result;
}

}  // namespace detail

// Step-3 optimizer: evolves latent vectors in [-1,1]^L decoded through the
// trained model into phenotypes. The decoder's sigmoid output keeps every
// phenotype inside the variable range.
inline OptimizeResult optimize_latent(const VaeModel& model,
                                      const ProblemSpec& spec,
                                      const GaConfig& ga, std::uint64_t seed) {
  if (model.arch.input_dim != spec.dimension)
    throw std::invalid_argument("model dimension does not match problem");
  return detail::optimize_with(
      spec, ga, seed, model.arch.latent_dim, [&](const Genotype& g) {
        VectorXd z(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) z[i] = g.genes[i];
        return denormalize_from_vae(decode(model, z), spec);
      });
}

// Baseline with identical settings: the genotype maps straight onto the
// variable range, no learned representation.
inline OptimizeResult optimize_direct(const ProblemSpec& spec,
                                      const GaConfig& ga, std::uint64_t seed) {
  return detail::optimize_with(
      spec, ga, seed, spec.dimension,
      [&](const Genotype& g) { return genotype_to_phenotype(g, spec); });
}

struct SweepPoint {
  std::vector<double> z;
  Phenotype x;
};

struct SweepTable {
  int sweep_dim = 0;
  std::vector<SweepPoint> points;
};

// Decodes a linspace over one latent coordinate with the others held fixed;
// the raw decode table for latent-space visualizations.
inline SweepTable latent_sweep(const VaeModel& model, const ProblemSpec& spec,
                               int sweep_dim, int grid_points,
                               const std::vector<double>& fixed = {}) {
  if (model.arch.input_dim != spec.dimension)
    throw std::invalid_argument("model dimension does not match problem");
  if (grid_points < 2)
    throw std::invalid_argument("sweep needs at least 2 grid points");
  const int latent = model.arch.latent_dim;
  if (sweep_dim < 0 || sweep_dim >= latent)
    throw std::invalid_argument("sweep dimension out of range");
  std::vector<double> base = fixed;
  if (base.empty()) base.assign(latent, 0.0);
  if (static_cast<int>(base.size()) != latent)
    throw std::invalid_argument("fixed latent vector length mismatch");

  SweepTable table;
  table.sweep_dim = sweep_dim;
  table.points.reserve(grid_points);
  for (int k = 0; k < grid_points; ++k) {
    SweepPoint point;
    point.z = base;
    point.z[sweep_dim] = -1.0 + 2.0 * k / (grid_points - 1);
    VectorXd z(latent);
    for (int i = 0; i < latent; ++i) z[i] = point.z[i];
    point.x = denormalize_from_vae(decode(model, z), spec);
    table.points.push_back(std::move(point));
  }
  return table;
}

// Fraction of sweep points whose decoded components all lie in [lo, hi].
inline double sweep_fraction_within(const SweepTable& table, double lo,
                                    double hi) {
  if (table.points.empty()) return 0.0;
  std::size_t inside = 0;
  for (const auto& point : table.points) {
    bool all = true;
    for (double v : point.x.vars)
      if (!(v >= lo && v <= hi)) all = false;
    if (all) ++inside;
  }
  return static_cast<double>(inside) / table.points.size();
}

inline void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  const std::size_t latent =
      table.points.empty() ? 0 : table.points.front().z.size();
  const std::size_t dim =
      table.points.empty() ? 0 : table.points.front().x.size();
  for (std::size_t i = 0; i < latent; ++i) {
    if (i) out << ',';
    out << 'z' << i;
  }
  for (std::size_t i = 0; i < dim; ++i) out << ",x" << i;
  out << '\n';
  for (const auto& point : table.points) {
    for (std::size_t i = 0; i < latent; ++i) {
      if (i) out << ',';
      out << format_double(point.z[i]);
    }
    for (std::size_t i = 0; i < dim; ++i)
      out << ',' << format_double(point.x.vars[i]);
    out << '\n';
  }
}

// Run trace in the base GA schema plus identifying columns.
inline void write_optimize_trace_csv(std::ostream& out,
                                     const EvolutionTrace& trace,
                                     const std::string& representation,
                                     ConstraintKind constraint, int dimension,
                                     std::uint64_t seed) {
  out << "generation,best_violation,mean_violation,best_objective_error,"
         "mean_objective_error,representation,constraint,dimension,seed\n";
  for (const auto& rec : trace.records) {
    out << rec.generation << ',' << format_double(rec.best_violation) << ','
        << format_double(rec.mean_violation) << ','
        << format_double(rec.best_objective_error) << ','
        << format_double(rec.mean_objective_error) << ',' << representation
        << ',' << to_string(constraint) << ',' << dimension << ',' << seed
        << '\n';
  }
}

}  // namespace coil

#endif
