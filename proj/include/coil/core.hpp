#ifndef COIL_CORE_HPP
#define COIL_CORE_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace coil {

// Search-space individual: genes bounded to [-1, 1], one per problem variable.
struct Genotype {
  std::vector<double> genes;

  std::size_t size() const { return genes.size(); }
  bool operator==(const Genotype&) const = default;
};

// Problem-variable vector the objective and constraints evaluate.
struct Phenotype {
  std::vector<double> vars;

  std::size_t size() const { return vars.size(); }
  bool operator==(const Phenotype&) const = default;
};

enum class ConstraintKind { C1, C2 };

inline std::string to_string(ConstraintKind kind) {
  return kind == ConstraintKind::C1 ? "C1" : "C2";
}

inline ConstraintKind constraint_from_string(const std::string& name) {
  if (name == "C1") return ConstraintKind::C1;
  if (name == "C2") return ConstraintKind::C2;
  throw std::invalid_argument("unknown constraint kind: " + name);
}

struct ProblemSpec {
  int dimension = 1;
  ConstraintKind constraint = ConstraintKind::C1;
  double var_min = -50.0;
  double var_max = 50.0;

  void validate() const {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(var_min < var_max))
      throw std::invalid_argument("var_min must be < var_max");
    if (constraint == ConstraintKind::C2 && dimension < 2)
      throw std::invalid_argument("C2 requires dimension >= 2");
  }
};

constexpr double kGeneMin = -1.0;
constexpr double kGeneMax = 1.0;

inline bool genotype_in_bounds(const Genotype& g) {
  for (double v : g.genes)
    if (!(v >= kGeneMin && v <= kGeneMax)) return false;
  return true;
}

// x_i = var_min + (g_i + 1)/2 * (var_max - var_min); affine and monotone.
inline Phenotype genotype_to_phenotype(const Genotype& g,
                                       const ProblemSpec& spec) {
  if (static_cast<int>(g.size()) != spec.dimension)
    throw std::invalid_argument("genotype length does not match dimension");
  Phenotype x;
  x.vars.reserve(g.size());
  for (double gene : g.genes)
    x.vars.push_back(spec.var_min +
                     (gene + 1.0) * 0.5 * (spec.var_max - spec.var_min));
  return x;
}

// Exact inverse of genotype_to_phenotype up to floating-point round-trip.
inline Genotype phenotype_to_genotype(const Phenotype& x,
                                      const ProblemSpec& spec) {
  if (static_cast<int>(x.size()) != spec.dimension)
    throw std::invalid_argument("phenotype length does not match dimension");
  Genotype g;
  g.genes.reserve(x.size());
  for (double var : x.vars) {
    if (!(var >= spec.var_min && var <= spec.var_max))
      throw std::out_of_range("phenotype component outside variable range");
    g.genes.push_back(2.0 * (var - spec.var_min) /
                          (spec.var_max - spec.var_min) -
                      1.0);
  }
  return g;
}

}  // namespace coil

#endif
