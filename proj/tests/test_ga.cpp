#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "coil/datagen.hpp"
#include "coil/ga.hpp"

using namespace coil;

namespace {

GaConfig paper_ga(int pop, int gens) {
  GaConfig ga;
  ga.population_size = pop;
  ga.max_generations = gens;
  return ga;
}

auto constant_evaluator() {
  return [](Population& pop, Rng&) {
    for (auto& ind : pop) {
      ind.criteria = {1.0, 1.0};
      ind.objective_error = 1.0;
      ind.selection_cost = 1.0;
    }
  };
}

}  // namespace

TEST_CASE("uniform crossover only swaps genes") {
  Rng rng(1);
  Genotype a{{-0.5, -0.5, -0.5}}, b{{0.5, 0.5, 0.5}};
  for (int trial = 0; trial < 100; ++trial) {
    Genotype ca = a, cb = b;
    uniform_crossover(ca, cb, 0.5, rng);
    for (int i = 0; i < 3; ++i) {
      CHECK(((ca.genes[i] == -0.5 && cb.genes[i] == 0.5) ||
             (ca.genes[i] == 0.5 && cb.genes[i] == -0.5)));
    }
  }

  Genotype same{{0.1, 0.2}}, same2{{0.1, 0.2}};
  uniform_crossover(same, same2, 0.5, rng);
  CHECK(same.genes == std::vector<double>{0.1, 0.2});
  CHECK(same2.genes == std::vector<double>{0.1, 0.2});

  Genotype short_one{{0.0}};
  CHECK_THROWS_AS(uniform_crossover(short_one, same, 0.5, rng),
                  std::invalid_argument);
}

TEST_CASE("uniform crossover swap frequency is one half") {
  Rng rng(2);
  const int trials = 10000, genes = 10;
  long swaps = 0;
  Genotype a, b;
  a.genes.assign(genes, -0.5);
  b.genes.assign(genes, 0.5);
  for (int t = 0; t < trials; ++t) {
    Genotype ca = a, cb = b;
    uniform_crossover(ca, cb, 0.5, rng);
    for (int i = 0; i < genes; ++i)
      if (ca.genes[i] == 0.5) ++swaps;
  }
  const double freq = static_cast<double>(swaps) / (trials * genes);
  CHECK(freq == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("gaussian mutation keeps bounds and is centered") {
  Rng rng(3);

  Genotype g{{0.3, -0.7}};
  gaussian_mutation(g, 0.0, 0.0, -1.0, 1.0, rng);
  CHECK(g.genes == std::vector<double>{0.3, -0.7});

  for (int trial = 0; trial < 1000; ++trial) {
    Genotype h{{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
    gaussian_mutation(h, 0.0, 5.0, -1.0, 1.0, rng);
    for (double gene : h.genes) {
      CHECK(gene >= -1.0);
      CHECK(gene <= 1.0);
    }
  }

  // Wide bounds so clipping never bites; the raw perturbation must average
  // to zero.
  Genotype wide;
  wide.genes.assign(100000, 0.0);
  gaussian_mutation(wide, 0.0, 1.0, -1e9, 1e9, rng);
  double sum = 0.0;
  for (double gene : wide.genes) sum += gene;
  CHECK(sum / wide.genes.size() == Catch::Approx(0.0).margin(0.01));
}

TEST_CASE("tournament selection basics") {
  Rng rng(4);
  CHECK(tournament_select_index({3.5}, 3, rng) == 0);

  const std::vector<double> costs{0.0, 1.0, 2.0, 3.0, 4.0,
                                  5.0, 6.0, 7.0, 8.0, 9.0};
  int picked_best = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i)
    if (tournament_select_index(costs, 3, rng) == 0) ++picked_best;
  const double freq = static_cast<double>(picked_best) / draws;
  CHECK(freq > 1.0 / costs.size());
  CHECK(freq > 0.15);  // expected ~0.27 for best-of-3 over 10

  // A tournament much larger than the population all but surely sees the
  // global best.
  const std::vector<double> five{4.0, 2.0, 3.0, 0.5, 1.0};
  for (int i = 0; i < 50; ++i)
    CHECK(tournament_select_index(five, 50, rng) == 3);
}

TEST_CASE("constant evaluator runs full horizon and keeps an initial best") {
  Rng rng(5);
  std::vector<Genotype> initial;
  auto observer = [&](int gen, const Population& pop) {
    if (gen == 0)
      for (const auto& ind : pop) initial.push_back(ind.genotype);
  };
  const GaConfig ga = paper_ga(10, 25);
  auto eval = constant_evaluator();
  const EvolveResult result = evolve(ga, 3, eval, rng, {}, observer);

  CHECK(result.trace.records.size() == 25);
  CHECK(result.generations_run == 25);
  bool found = false;
  for (const auto& g : initial)
    if (g == result.best.genotype) found = true;
  CHECK(found);
}

TEST_CASE("bounds and population size hold after every operator") {
  Rng rng(6);
  auto eval = make_violation_evaluator({3, ConstraintKind::C1});
  auto observer = [&](int, const Population& pop) {
    REQUIRE(pop.size() == 30);
    for (const auto& ind : pop) CHECK(genotype_in_bounds(ind.genotype));
  };
  evolve(paper_ga(30, 40), 3, eval, rng, {}, observer);
}

TEST_CASE("best-ever violation is monotone non-increasing in the trace") {
  Rng rng(7);
  auto eval = make_violation_evaluator({3, ConstraintKind::C1});
  const EvolveResult result = evolve(paper_ga(50, 60), 3, eval, rng, {});
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& rec : result.trace.records) {
    CHECK(rec.best_violation <= previous);
    previous = rec.best_violation;
  }
}

TEST_CASE("violation-driven GA reaches zero on the aggregate bound") {
  // Population 200 for up to 200 generations, stopping at zero violation.
  auto eval = make_violation_evaluator({3, ConstraintKind::C1});
  int successes = 0;
  int max_generations_used = 0;
  for (int run = 0; run < 100; ++run) {
    Rng rng(derive_seed(1000, run));
    const EvolveResult result =
        evolve(paper_ga(200, 200), 3, eval, rng, TerminationRule{0.0});
    if (result.best.criteria.violation == 0.0) ++successes;
    max_generations_used = std::max(max_generations_used,
                                    result.generations_run);
  }
  INFO("max generations used " << max_generations_used);
  CHECK(successes >= 95);
}

TEST_CASE("seeded runs are identical byte for byte") {
  auto eval = make_violation_evaluator({2, ConstraintKind::C1});
  auto run = [&] {
    Rng rng(99);
    return evolve(paper_ga(40, 30), 2, eval, rng, {});
  };
  const EvolveResult a = run();
  const EvolveResult b = run();
  CHECK(a.best.genotype == b.best.genotype);

  std::ostringstream sa, sb;
  write_trace_csv(sa, a.trace);
  write_trace_csv(sb, b.trace);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().starts_with(
      "generation,best_violation,mean_violation,best_objective_error,"
      "mean_objective_error\n"));
}

TEST_CASE("ga config validation") {
  GaConfig bad = paper_ga(0, 10);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = paper_ga(10, 10);
  bad.crossover_prob = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = paper_ga(10, 10);
  bad.mutation_prob = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
