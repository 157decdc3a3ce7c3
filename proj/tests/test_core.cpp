#include <catch2/catch_amalgamated.hpp>

#include "coil/core.hpp"
#include "coil/rng.hpp"

using namespace coil;

namespace {
ProblemSpec spec_of(int dimension) {
  return ProblemSpec{dimension, ConstraintKind::C1};
}
}  // namespace

TEST_CASE("genotype to phenotype affine map") {
  CHECK(genotype_to_phenotype({{0.0}}, spec_of(1)).vars[0] == 0.0);
  const Phenotype ends = genotype_to_phenotype({{1.0, -1.0}}, spec_of(2));
  CHECK(ends.vars[0] == 50.0);
  CHECK(ends.vars[1] == -50.0);
  CHECK(genotype_to_phenotype({{0.9}}, spec_of(1)).vars[0] ==
        Catch::Approx(45.0).margin(1e-12));
}

TEST_CASE("phenotype to genotype inverse map") {
  CHECK(phenotype_to_genotype({{45.0}}, spec_of(1)).genes[0] ==
        Catch::Approx(0.9).margin(1e-12));
  CHECK(phenotype_to_genotype({{-50.0}}, spec_of(1)).genes[0] == -1.0);
}

TEST_CASE("round-trip is exact to 1e-12 componentwise") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + static_cast<int>(rng.uniform_index(10));
    Genotype g;
    for (int i = 0; i < dim; ++i) g.genes.push_back(rng.uniform(-1.0, 1.0));
    const Genotype back =
        phenotype_to_genotype(genotype_to_phenotype(g, spec_of(dim)),
                              spec_of(dim));
    for (int i = 0; i < dim; ++i)
      CHECK(std::abs(back.genes[i] - g.genes[i]) <= 1e-12);
  }
}

TEST_CASE("mapping is strictly monotone per component") {
  Rng rng(11);
  const ProblemSpec spec = spec_of(1);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    if (a == b) continue;
    const double xa = genotype_to_phenotype({{a}}, spec).vars[0];
    const double xb = genotype_to_phenotype({{b}}, spec).vars[0];
    CHECK((a < b) == (xa < xb));
  }
}

TEST_CASE("mapping errors") {
  CHECK_THROWS_AS(genotype_to_phenotype({{0.0, 0.0}}, spec_of(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(phenotype_to_genotype({{0.0}}, spec_of(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(phenotype_to_genotype({{50.5}}, spec_of(1)),
                  std::out_of_range);
  CHECK_THROWS_AS((ProblemSpec{0, ConstraintKind::C1}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS((ProblemSpec{1, ConstraintKind::C2}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS((ProblemSpec{2, ConstraintKind::C1, 5.0, 5.0}).validate(),
                  std::invalid_argument);
}

TEST_CASE("rng streams are reproducible and child seeds distinct") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform01() == b.uniform01());
    CHECK(a.normal() == b.normal());
  }

  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));

  Rng c(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.uniform_index(7) < 7);
  }
}

TEST_CASE("constraint kind names round-trip") {
  CHECK(constraint_from_string(to_string(ConstraintKind::C1)) ==
        ConstraintKind::C1);
  CHECK(constraint_from_string(to_string(ConstraintKind::C2)) ==
        ConstraintKind::C2);
  CHECK_THROWS_AS(constraint_from_string("C3"), std::invalid_argument);
}
