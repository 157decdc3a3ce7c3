#ifndef COIL_CONSTRAINTS_HPP
#define COIL_CONSTRAINTS_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "coil/core.hpp"
#include "coil/rng.hpp"

namespace coil {

// Gap bounds for the chained-inequality constraint.
struct C2Bounds {
  double gap_min = 8.0;
  double gap_max = 10.0;
};

// Sphere objective, minimized everywhere in this project.
inline double objective(const Phenotype& x) {
  double sum = 0.0;
  for (double v : x.vars) sum += v * v;
  return sum;
}

// Aggregate bound constraint: sum(45 - x_i) <= 0. Returns the hinge of the
// aggregate, 0 exactly on the feasible half-space.
inline double c1_violation(const Phenotype& x) {
  double sum = 0.0;
  for (double v : x.vars) sum += 45.0 - v;
  return std::max(0.0, sum);
}

// Chained inequality: gap_min <= x_{i+1} - x_i <= gap_max for every adjacent
// pair. Violation is the summed shortfall/excess over all gaps; a single
// variable has no pairs and is always feasible.
inline double c2_violation(const Phenotype& x, C2Bounds bounds = {}) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.vars.size(); ++i) {
    const double gap = x.vars[i + 1] - x.vars[i];
    total += std::max(0.0, bounds.gap_min - gap);
    total += std::max(0.0, gap - bounds.gap_max);
  }
  return total;
}

inline double violation(const ProblemSpec& spec, const Phenotype& x) {
  return spec.constraint == ConstraintKind::C1 ? c1_violation(x)
                                               : c2_violation(x);
}

struct Optimum {
  Phenotype x;
  double f = 0.0;
};

// Closed-form constrained minima of the sphere objective, used for the
// "objective error" reporting throughout.
//   C1: all variables at the bound value 45, f* = 2025 * D.
//   C2: chain with minimal gap 8 centered on the origin, f* = 16(D^3 - D)/3.
inline Optimum constrained_optimum(const ProblemSpec& spec) {
  spec.validate();
  Optimum best;
  best.x.vars.resize(spec.dimension);
  if (spec.constraint == ConstraintKind::C1) {
    std::fill(best.x.vars.begin(), best.x.vars.end(), 45.0);
    best.f = 2025.0 * spec.dimension;
  } else {
    const double d = spec.dimension;
    for (int k = 0; k < spec.dimension; ++k)
      best.x.vars[k] = 8.0 * (k - (d - 1.0) / 2.0);
    best.f = 16.0 * (d * d * d - d) / 3.0;
  }
  return best;
}

// Direct constructive sampler for C2: grow a chain outward from a random
// start, every gap drawn from [gap_min, gap_max], and reject when the chain
// leaves the variable range. Accepted chains satisfy c2_violation == 0
// exactly by construction.
inline std::optional<Phenotype> sample_c2(int dimension, Rng& rng,
                                          double var_min = -50.0,
                                          double var_max = 50.0,
                                          C2Bounds bounds = {}) {
  if (dimension < 2)
    throw std::invalid_argument("sample_c2 requires dimension >= 2");

  std::vector<double> chain;
  chain.reserve(dimension);
  const double r = rng.uniform(var_min, var_max);
  if (dimension % 2 == 0) {
    chain.push_back(r);
    chain.push_back(r + rng.uniform(bounds.gap_min, bounds.gap_max));
  } else {
    const double below = r - rng.uniform(bounds.gap_min, bounds.gap_max);
    const double above = r + rng.uniform(bounds.gap_min, bounds.gap_max);
    chain.push_back(below);
    chain.push_back(r);
    chain.push_back(above);
  }
  while (static_cast<int>(chain.size()) < dimension) {
    chain.insert(chain.begin(),
                 chain.front() - rng.uniform(bounds.gap_min, bounds.gap_max));
    chain.push_back(chain.back() + rng.uniform(bounds.gap_min, bounds.gap_max));
  }

  if (chain.front() >= var_min && chain.back() <= var_max)
    return Phenotype{std::move(chain)};
  return std::nullopt;
}

}  // namespace coil

#endif
