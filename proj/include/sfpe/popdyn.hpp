#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "sfpe/branching.hpp"
#include "sfpe/laws.hpp"
#include "sfpe/maps.hpp"
#include "sfpe/wasserstein.hpp"

namespace sfpe {

struct PoolMeta {
  std::string map_label;
  std::string spec_label;
  std::string init_label;
  std::uint64_t seed = 0;
  std::size_t m = 0;
};

// The level-j pool P^(j,m). Values keep their generation order; sorting
// happens only in pool_to_empirical, on a copy.
struct SamplePool {
  int level = 0;
  std::vector<double> values;
  PoolMeta meta;
};

struct PopDynOptions {
  int threads = 1;
  // Keep pools for all levels (needed by diagnostics). When false only the
  // final level is returned; intermediate pools are dropped as soon as the
  // next level is filled.
  bool keep_all_levels = true;
  // Counts apply_map invocations when set; the engine performs exactly k*m.
  std::atomic<std::uint64_t>* phi_counter = nullptr;
};

// I.i.d. uniform indices into [0, m), deterministic given the stream.
std::vector<std::size_t> resample_indices(std::size_t m, std::size_t count,
                                          RandomStream& rng);

// Level-0 pool: m i.i.d. mu_0 draws, element i on substream
// (seed, kPopDyn, 0, i).
SamplePool initial_pool(const SfpeMap& map, const BranchingVectorSpec& spec,
                        std::size_t m, const InitialDistribution& init,
                        std::uint64_t seed, const PopDynOptions& opts = {});

// One bootstrap step: pool at prev.level + 1. Element i draws, on substream
// (seed, kPopDyn, level, i), first its branching realization (N -> C -> Q)
// and then N uniform indices into the previous pool, read as stored.
// Depends only on prev and level randomness, so any level can be replayed
// from a snapshot.
SamplePool advance_level(const SfpeMap& map, const BranchingVectorSpec& spec,
                         const SamplePool& prev, std::uint64_t seed,
                         const PopDynOptions& opts = {});

// Full recursion; returns pools for levels 0..k (or just level k in
// streaming mode). Output is identical for any thread count.
std::vector<SamplePool> run_population_dynamics(const SfpeMap& map,
                                                const BranchingVectorSpec& spec,
                                                int k, std::size_t m,
                                                const InitialDistribution& init,
                                                std::uint64_t seed,
                                                const PopDynOptions& opts = {});

EmpiricalDistribution pool_to_empirical(const SamplePool& pool);

}  // namespace sfpe
