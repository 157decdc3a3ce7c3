#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>

#include "coil/optimize.hpp"

using namespace coil;

namespace {

GaConfig paper_optimizer() {
  GaConfig ga;
  ga.population_size = 20;
  ga.max_generations = 50;
  return ga;
}

VaeModel zero_model(int dim) {
  Rng rng(0);
  VaeModel model = init_vae({dim, dim, 8}, rng);
  detail::for_each_parameter(model, [](auto& p) { p.setZero(); });
  return model;
}

// Literal re-execution of the tournament-fitness procedure, written straight
// from its definition and kept independent of the library implementation.
std::vector<double> tournament_oracle(const std::vector<CriterionVector>& pop,
                                      std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = pop.size();
  std::vector<double> points(n, 0.0);
  std::vector<double> matches(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t group[5];
    for (auto& member : group) member = rng.uniform_index(n);
    for (int j = 0; j < 10; ++j) {
      const std::size_t a = group[rng.uniform_index(5)];
      const std::size_t b = group[rng.uniform_index(5)];
      matches[a] += 1.0;
      matches[b] += 1.0;
      for (int criterion = 0; criterion < 2; ++criterion) {
        const double va = criterion == 0 ? pop[a].objective_value
                                         : pop[a].violation;
        const double vb = criterion == 0 ? pop[b].objective_value
                                         : pop[b].violation;
        if (va < vb) points[a] += 1.0;
        if (vb < va)
          points[b] += 1.0;
        else if (vb == va) {
          points[a] += 1.0;
          points[b] += 1.0;
        }
      }
    }
  }
  std::vector<double> fitness(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (matches[i] > 0.0) fitness[i] = points[i] / matches[i];
  return fitness;
}

}  // namespace

TEST_CASE("tournament fitness ties give everyone the same score") {
  std::vector<CriterionVector> identical(8, CriterionVector{3.0, 1.5});
  Rng rng(11);
  const auto result = tournament_fitness(identical, rng);
  for (std::size_t i = 0; i < identical.size(); ++i) {
    if (result.num_matches[i] > 0)
      CHECK(result.fitness[i] == 2.0);  // both criteria tie every match
    else
      CHECK(result.fitness[i] == 0.0);
  }
}

TEST_CASE("tournament fitness rewards dominance") {
  // A dominates B on both criteria.
  const std::vector<CriterionVector> pair{{1.0, 0.0}, {5.0, 2.0}};
  Rng rng(3);
  const auto result = tournament_fitness(pair, rng);
  CHECK(result.fitness[0] == 2.0);  // 2 points per match in every match type
  CHECK(result.fitness[1] < 2.0);
  CHECK(result.fitness[1] >= 0.0);
}

TEST_CASE("tournament fitness matches an independent transcription") {
  const std::vector<CriterionVector> pop{{1.0, 0.0}, {2.0, 0.0}, {0.5, 3.0},
                                         {4.0, 1.0}, {2.0, 2.0}, {1.0, 0.0}};
  Rng rng(77);
  const auto result = tournament_fitness(pop, rng);
  const auto expected = tournament_oracle(pop, 77);
  REQUIRE(result.fitness.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(result.fitness[i] == expected[i]);
}

TEST_CASE("tournament fitness is invariant to monotone transforms") {
  Rng source(41);
  std::vector<CriterionVector> pop(12);
  for (auto& c : pop) {
    c.objective_value = source.uniform(-5.0, 5.0);
    c.violation = source.uniform(0.0, 3.0);
  }
  std::vector<CriterionVector> transformed = pop;
  for (auto& c : transformed)
    c.objective_value = std::pow(c.objective_value, 3) + 5.0;

  Rng a(123), b(123);
  const auto plain = tournament_fitness(pop, a);
  const auto warped = tournament_fitness(transformed, b);
  CHECK(plain.fitness == warped.fitness);
  CHECK(plain.num_matches == warped.num_matches);
}

TEST_CASE("tournament fitness stays within bounds") {
  Rng source(4242);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CriterionVector> pop(2 +
                                     source.uniform_index(20));
    for (auto& c : pop) {
      c.objective_value = source.uniform(0.0, 10.0);
      c.violation = source.uniform(0.0, 2.0);
    }
    Rng rng(trial);
    const auto result = tournament_fitness(pop, rng);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      CHECK(result.fitness[i] >= 0.0);
      CHECK(result.fitness[i] <= 2.0);
      if (result.num_matches[i] == 0) CHECK(result.fitness[i] == 0.0);
    }
  }

  std::vector<CriterionVector> bad{{std::nan(""), 0.0}};
  Rng rng(1);
  CHECK_THROWS_AS(tournament_fitness(bad, rng), std::invalid_argument);
}

TEST_CASE("direct optimizer is deterministic per seed") {
  const ProblemSpec spec{3, ConstraintKind::C1};
  const OptimizeResult a = optimize_direct(spec, paper_optimizer(), 2024);
  const OptimizeResult b = optimize_direct(spec, paper_optimizer(), 2024);
  CHECK(a.best_phenotype == b.best_phenotype);
  CHECK(a.best_criteria.violation == b.best_criteria.violation);
  CHECK(a.generations_run == 50);
  CHECK(a.trace.records.size() == 50);

  std::ostringstream csv;
  write_optimize_trace_csv(csv, a.trace, "direct", spec.constraint,
                           spec.dimension, 2024);
  CHECK(csv.str().starts_with(
      "generation,best_violation,mean_violation,best_objective_error,"
      "mean_objective_error,representation,constraint,dimension,seed\n"));
  CHECK(csv.str().find(",direct,C1,3,2024") != std::string::npos);
}

TEST_CASE("latent optimizer decodes through the model") {
  const ProblemSpec spec{3, ConstraintKind::C1};
  const VaeModel zeros = zero_model(3);
  // Zero weights decode every latent point to 0.5, i.e. phenotype 0.
  const OptimizeResult result =
      optimize_latent(zeros, spec, paper_optimizer(), 5);
  for (double v : result.best_phenotype.vars)
    CHECK(v == Catch::Approx(0.0).margin(1e-12));
  CHECK(result.best_criteria.violation == Catch::Approx(135.0).margin(1e-9));

  CHECK_THROWS_AS(
      optimize_latent(zero_model(2), spec, paper_optimizer(), 5),
      std::invalid_argument);
}

TEST_CASE("latent optimizer keeps phenotypes inside the variable range") {
  const ProblemSpec spec{2, ConstraintKind::C2};
  Rng rng(9);
  VaeModel model = init_vae({2, 2, 16}, rng);
  const OptimizeResult result =
      optimize_latent(model, spec, paper_optimizer(), 31);
  for (double v : result.best_phenotype.vars) {
    CHECK(v >= spec.var_min);
    CHECK(v <= spec.var_max);
  }
}

TEST_CASE("unconstrained sphere run sanity-checks the machinery") {
  const ProblemSpec spec{3, ConstraintKind::C1};
  auto evaluator = [&](Population& pop, Rng& rng) {
    std::vector<CriterionVector> criteria(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const Phenotype x = genotype_to_phenotype(pop[i].genotype, spec);
      criteria[i] = {objective(x), 0.0};  // violation switched off
      pop[i].criteria = criteria[i];
      pop[i].objective_error = criteria[i].objective_value;
    }
    const auto scored = tournament_fitness(criteria, rng);
    for (std::size_t i = 0; i < pop.size(); ++i)
      pop[i].selection_cost = -scored.fitness[i];
  };
  Rng rng(88);
  const EvolveResult result = evolve(paper_optimizer(), 3, evaluator, rng, {});
  const double initial_best = result.trace.records.front().best_objective_error;
  const double final_best = result.trace.records.back().best_objective_error;
  INFO("sphere objective: first-gen best " << initial_best << ", final best "
                                           << final_best);
  CHECK(final_best <= initial_best);
  CHECK(final_best < 500.0);  // far below the ~2500 average of random points
}

TEST_CASE("latent sweep grid and bounds") {
  const VaeModel zeros = zero_model(2);
  const ProblemSpec spec{2, ConstraintKind::C2};
  const SweepTable table = latent_sweep(zeros, spec, 0, 5);
  REQUIRE(table.points.size() == 5);
  CHECK(table.points.front().z[0] == -1.0);
  CHECK(table.points.back().z[0] == 1.0);
  CHECK(table.points[2].z[0] == 0.0);
  for (const auto& point : table.points) {
    CHECK(point.z[1] == 0.0);
    // Constant decode for the zero model.
    CHECK(point.x.vars[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(point.x.vars[1] == Catch::Approx(0.0).margin(1e-12));
  }
  CHECK(sweep_fraction_within(table, -1.0, 1.0) == 1.0);
  CHECK(sweep_fraction_within(table, 10.0, 20.0) == 0.0);

  CHECK_THROWS_AS(latent_sweep(zeros, spec, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(latent_sweep(zeros, spec, 5, 10), std::invalid_argument);

  std::ostringstream csv;
  write_sweep_csv(csv, table);
  CHECK(csv.str().starts_with("z0,z1,x0,x1\n"));
}
