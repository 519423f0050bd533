#pragma once

#include <cstdint>
#include <vector>

#include "sfpe/branching.hpp"
#include "sfpe/laws.hpp"
#include "sfpe/maps.hpp"

namespace sfpe {

// Node budget guarding the (E[N])^k blow-up of exact tree sampling.
struct OracleBudget {
  std::uint64_t max_nodes = 10'000'000;          // per draw
  std::uint64_t max_total_nodes = 1'000'000'000; // per batch
};

struct OracleDraw {
  double value = 0.0;
  std::uint64_t nodes = 0;  // tree nodes visited, depth-k leaves included
};

// One draw exactly distributed as mu_k: depth-first fold of Phi over a
// depth-k tree with i.i.d. mu_0 values at the leaves. Every node's
// randomness is keyed from its tree path (child r of key K gets key
// mix64(K ^ (r+1)*kGolden)), so draws sharing a root key at different
// depths share their common-prefix realizations, and a k=0 draw consumes
// mu_0 exactly as a level-0 pool element with the same substream would.
OracleDraw sample_exact(const SfpeMap& map, const BranchingVectorSpec& spec, int k,
                        const InitialDistribution& init, std::uint64_t draw_key,
                        const OracleBudget& budget = {});

// Convenience overload matching the rng-based call shape: pulls the draw
// key from the stream.
OracleDraw sample_exact(const SfpeMap& map, const BranchingVectorSpec& spec, int k,
                        const InitialDistribution& init, RandomStream& rng,
                        const OracleBudget& budget = {});

// n independent draws; draw i is keyed by substream (seed, kOracle, 0, i),
// independent of k, so batches with equal seeds at different depths are
// coupled through shared subtrees and order-independent under parallelism.
std::vector<double> sample_exact_iid(const SfpeMap& map,
                                     const BranchingVectorSpec& spec, int k,
                                     const InitialDistribution& init, std::size_t n,
                                     std::uint64_t seed,
                                     const OracleBudget& budget = {}, int threads = 1,
                                     std::uint64_t* total_nodes = nullptr);

struct NodeCountEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;  // deterministic offspring law: geometric sum
};

// Expected depth-k tree size sum_{j<=k} E[N]^j: exact for deterministic N,
// otherwise a Monte Carlo mean over simulated generation sizes (each trial
// capped at budget.max_nodes, making runaway specs a lower-bound estimate).
NodeCountEstimate node_count_estimate(const BranchingVectorSpec& spec, int k,
                                      std::size_t trials, RandomStream& rng,
                                      const OracleBudget& budget = {});

}  // namespace sfpe
