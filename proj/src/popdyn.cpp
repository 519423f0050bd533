#include "sfpe/popdyn.hpp"

#include <stdexcept>
#include <string>

#include "sfpe/errors.hpp"
#include "sfpe/util.hpp"

namespace sfpe {

std::vector<std::size_t> resample_indices(std::size_t m, std::size_t count,
                                          RandomStream& rng) {
  if (m < 1) throw std::invalid_argument("resample_indices: m must be >= 1");
  std::vector<std::size_t> out(count);
  for (auto& idx : out) idx = static_cast<std::size_t>(rng.uniform_index(m));
  return out;
}

SamplePool initial_pool(const SfpeMap& map, const BranchingVectorSpec& spec,
                        std::size_t m, const InitialDistribution& init,
                        std::uint64_t seed, const PopDynOptions& opts) {
  if (m < 1) throw std::invalid_argument("initial_pool: m must be >= 1");
  SamplePool pool;
  pool.level = 0;
  pool.meta = {map.label(), spec.label(), init.to_string(), seed, m};
  pool.values.resize(m);
  parallel_for_ranges(m, opts.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RandomStream rs(substream_seed(seed, StreamDomain::kPopDyn, 0, i));
      pool.values[i] = init.draw(rs);
    }
  });
  return pool;
}

SamplePool advance_level(const SfpeMap& map, const BranchingVectorSpec& spec,
                         const SamplePool& prev, std::uint64_t seed,
                         const PopDynOptions& opts) {
  const std::size_t m = prev.values.size();
  if (m < 1) throw std::invalid_argument("advance_level: empty pool");
  const int level = prev.level + 1;

  SamplePool next;
  next.level = level;
  next.meta = prev.meta;
  next.values.resize(m);

  parallel_for_ranges(m, opts.threads, [&](std::size_t lo, std::size_t hi) {
    BranchingRealization real;
    std::vector<double> children;
    std::uint64_t phi_calls = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      // Element substream; draw order: realization (N -> C -> Q), then the
      // N resample indices.
      RandomStream rs(substream_seed(seed, StreamDomain::kPopDyn,
                                     static_cast<std::uint64_t>(level), i));
      sample_branching_vector(spec, rs, real);
      children.resize(real.n());
      for (std::size_t r = 0; r < real.n(); ++r)
        children[r] = prev.values[rs.uniform_index(m)];
      try {
        next.values[i] = apply_map(map, real, children);
      } catch (const OverflowError& e) {
        throw OverflowError("overflow at level " + std::to_string(level) + ", element " +
                                std::to_string(i) + ": " + e.what(),
                            level, static_cast<std::int64_t>(i));
      }
      ++phi_calls;
    }
    if (opts.phi_counter)
      opts.phi_counter->fetch_add(phi_calls, std::memory_order_relaxed);
  });
  return next;
}

std::vector<SamplePool> run_population_dynamics(const SfpeMap& map,
                                                const BranchingVectorSpec& spec, int k,
                                                std::size_t m,
                                                const InitialDistribution& init,
                                                std::uint64_t seed,
                                                const PopDynOptions& opts) {
  if (k < 0) throw std::invalid_argument("run_population_dynamics: k must be >= 0");
  if (m < 1) throw std::invalid_argument("run_population_dynamics: m must be >= 1");
  const auto report = validate_spec(spec);
  if (!report.ok) {
    std::string msg = "run_population_dynamics: invalid spec";
    for (const auto& e : report.errors) msg += "; " + e;
    throw ConfigError(msg);
  }

  std::vector<SamplePool> pools;
  pools.reserve(opts.keep_all_levels ? static_cast<std::size_t>(k) + 1 : 1);
  pools.push_back(initial_pool(map, spec, m, init, seed, opts));
  for (int level = 1; level <= k; ++level) {
    SamplePool next = advance_level(map, spec, pools.back(), seed, opts);
    if (opts.keep_all_levels)
      pools.push_back(std::move(next));
    else
      pools.back() = std::move(next);
  }
  return pools;
}

EmpiricalDistribution pool_to_empirical(const SamplePool& pool) {
  return EmpiricalDistribution(pool.values);
}

}  // namespace sfpe
