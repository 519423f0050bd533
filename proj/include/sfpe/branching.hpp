#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfpe/laws.hpp"
#include "sfpe/rng.hpp"

namespace sfpe {

// One drawn instance of the generic branching vector: q, the offspring
// count n, and exactly n weights. Weights past n are never materialized;
// none of the built-in maps read them.
struct BranchingRealization {
  double q = 0.0;
  std::vector<double> c;

  std::size_t n() const { return c.size(); }
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> errors;
};

// Distributional description of the generic branching vector (Q, N, {C_i}).
// Immutable once built; shareable across threads.
struct BranchingVectorSpec {
  enum class Kind { kQuicksort, kFind, kIsing, kPageRankLike, kCustom };

  Kind kind = Kind::kQuicksort;

  // Ising: C_i == tanh(beta); N from `offspring`, Q from `field`.
  double beta = 0.0;
  PrimitiveLaw offspring = PrimitiveLaw::constant(2);
  PrimitiveLaw field = PrimitiveLaw::constant(1);

  // PageRankLike: N ~ Poisson(mean_offspring), C_i ~ Uniform[-a, a] with
  // a = cap * min(1, 2/mean_offspring), Q == q_const. One admissible choice
  // for the distributional relations |C_i| <= cap, E|C_1|^p <= cap^p / E[N].
  double cap = 0.5;
  double mean_offspring_param = 3.0;
  double q_const = 1.0;

  // Custom: independent primitive laws, sampled in the order N -> C -> Q.
  PrimitiveLaw n_law = PrimitiveLaw::constant(0);
  PrimitiveLaw c_law = PrimitiveLaw::constant(0);
  PrimitiveLaw q_law = PrimitiveLaw::constant(0);

  // A single draw requesting more than this many weights is a budget error.
  std::uint64_t offspring_cap = 1'000'000;

  static BranchingVectorSpec quicksort();
  static BranchingVectorSpec find();
  static BranchingVectorSpec ising(double beta,
                                   PrimitiveLaw offspring = PrimitiveLaw::constant(2),
                                   PrimitiveLaw field = PrimitiveLaw::constant(1));
  static BranchingVectorSpec pagerank_like(double cap, double mean_offspring,
                                           double q_const = 1.0);
  static BranchingVectorSpec custom(PrimitiveLaw n_law, PrimitiveLaw c_law,
                                    PrimitiveLaw q_law);

  // Flat key=value form; grammar documented in the README.
  std::map<std::string, std::string> to_params() const;
  static BranchingVectorSpec from_params(const std::string& kind,
                                         const std::map<std::string, std::string>& params);
  std::string label() const;
};

const char* kind_name(BranchingVectorSpec::Kind k);

ValidationReport validate_spec(const BranchingVectorSpec& spec);

// Draws one i.i.d.-fresh realization. Sampling order is N -> C -> Q on the
// given stream. Throws BudgetError when N exceeds spec.offspring_cap.
void sample_branching_vector(const BranchingVectorSpec& spec, RandomStream& rng,
                             BranchingRealization& out);
BranchingRealization sample_branching_vector(const BranchingVectorSpec& spec,
                                             RandomStream& rng);

// Monte Carlo estimate of E[N]; exact for deterministic-N specs.
double mean_offspring(const BranchingVectorSpec& spec, std::size_t trials,
                      RandomStream& rng);
// Closed-form E[N] when the offspring law admits one.
std::optional<double> exact_mean_offspring(const BranchingVectorSpec& spec);

}  // namespace sfpe
