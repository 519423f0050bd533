#include "sfpe/wbp.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

#include "sfpe/errors.hpp"
#include "sfpe/util.hpp"

namespace sfpe {

namespace {

// Key of child r under a node key. Keys form a hash tree over node paths,
// so a node's randomness is a function of (draw key, path) alone.
std::uint64_t child_key(std::uint64_t parent_key, std::uint64_t r) {
  return mix64(parent_key ^ ((r + 1) * kGolden));
}

struct Frame {
  BranchingRealization real;
  std::vector<double> children;
  std::size_t next = 0;
  std::uint64_t key = 0;
};

}  // namespace

OracleDraw sample_exact(const SfpeMap& map, const BranchingVectorSpec& spec, int k,
                        const InitialDistribution& init, std::uint64_t draw_key,
                        const OracleBudget& budget) {
  if (k < 0) throw std::invalid_argument("sample_exact: k must be >= 0");
  std::uint64_t nodes = 0;
  auto charge_node = [&]() {
    if (++nodes > budget.max_nodes)
      throw BudgetError("sample_exact: node budget of " +
                            std::to_string(budget.max_nodes) + " exceeded",
                        nodes);
  };
  auto leaf_value = [&](std::uint64_t key) {
    RandomStream rs(key);
    return init.draw(rs);
  };

  charge_node();
  if (k == 0) return {leaf_value(draw_key), nodes};

  // Depth-first fold with one reusable frame per internal depth.
  std::vector<Frame> frames(static_cast<std::size_t>(k));
  auto enter = [&](Frame& f, std::uint64_t key) {
    f.key = key;
    f.next = 0;
    f.children.clear();
    RandomStream rs(key);
    sample_branching_vector(spec, rs, f.real);
  };

  int depth = 0;
  enter(frames[0], draw_key);
  for (;;) {
    Frame& f = frames[static_cast<std::size_t>(depth)];
    if (f.next < f.real.n()) {
      const std::uint64_t ck = child_key(f.key, f.next);
      ++f.next;
      charge_node();
      if (depth + 1 == k) {
        f.children.push_back(leaf_value(ck));
      } else {
        ++depth;
        enter(frames[static_cast<std::size_t>(depth)], ck);
      }
    } else {
      double v;
      try {
        v = apply_map(map, f.real, f.children);
      } catch (const OverflowError& e) {
        throw OverflowError("overflow in exact sampler at depth " +
                                std::to_string(depth) + ": " + e.what(),
                            depth);
      }
      if (depth == 0) return {v, nodes};
      --depth;
      frames[static_cast<std::size_t>(depth)].children.push_back(v);
    }
  }
}

OracleDraw sample_exact(const SfpeMap& map, const BranchingVectorSpec& spec, int k,
                        const InitialDistribution& init, RandomStream& rng,
                        const OracleBudget& budget) {
  return sample_exact(map, spec, k, init, rng.split(), budget);
}

std::vector<double> sample_exact_iid(const SfpeMap& map, const BranchingVectorSpec& spec,
                                     int k, const InitialDistribution& init,
                                     std::size_t n, std::uint64_t seed,
                                     const OracleBudget& budget, int threads,
                                     std::uint64_t* total_nodes) {
  std::vector<double> out(n);
  std::atomic<std::uint64_t> nodes{0};
  parallel_for_ranges(n, threads, [&](std::size_t lo, std::size_t hi) {
    std::uint64_t local_nodes = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint64_t key = substream_seed(seed, StreamDomain::kOracle, 0, i);
      OracleDraw draw;
      try {
        draw = sample_exact(map, spec, k, init, key, budget);
      } catch (const BudgetError& e) {
        throw BudgetError("sample_exact_iid: draw " + std::to_string(i) + ": " + e.what(),
                          e.nodes_seen, static_cast<std::int64_t>(i));
      }
      out[i] = draw.value;
      local_nodes += draw.nodes;
      if (nodes.fetch_add(0, std::memory_order_relaxed) + local_nodes >
          budget.max_total_nodes)
        throw BudgetError("sample_exact_iid: total node budget of " +
                              std::to_string(budget.max_total_nodes) +
                              " exceeded at draw " + std::to_string(i),
                          local_nodes, static_cast<std::int64_t>(i));
    }
    nodes.fetch_add(local_nodes, std::memory_order_relaxed);
  });
  if (total_nodes) *total_nodes = nodes.load();
  return out;
}

NodeCountEstimate node_count_estimate(const BranchingVectorSpec& spec, int k,
                                      std::size_t trials, RandomStream& rng,
                                      const OracleBudget& budget) {
  if (k < 0) throw std::invalid_argument("node_count_estimate: k must be >= 0");
  if (trials < 1) throw std::invalid_argument("node_count_estimate: trials must be >= 1");

  // Deterministic offspring: sum_{j<=k} d^j exactly.
  std::optional<double> fixed_n;
  switch (spec.kind) {
    case BranchingVectorSpec::Kind::kQuicksort:
    case BranchingVectorSpec::Kind::kFind:
      fixed_n = 2.0;
      break;
    case BranchingVectorSpec::Kind::kIsing:
      if (spec.offspring.kind == PrimitiveLaw::Kind::kConstant) fixed_n = spec.offspring.a;
      break;
    case BranchingVectorSpec::Kind::kCustom:
      if (spec.n_law.kind == PrimitiveLaw::Kind::kConstant) fixed_n = spec.n_law.a;
      break;
    default:
      break;
  }
  if (fixed_n) {
    double total = 0.0, pow_j = 1.0;
    for (int j = 0; j <= k; ++j) {
      total += pow_j;
      pow_j *= *fixed_n;
    }
    return {total, 0.0, true};
  }

  // Simulate generation sizes only; each trial is capped at the per-draw
  // node budget, so runaway specs yield a (flagged-by-size) lower bound.
  std::vector<double> totals(trials);
  BranchingRealization real;
  for (std::size_t t = 0; t < trials; ++t) {
    std::uint64_t total = 1, gen = 1;
    for (int j = 1; j <= k && gen > 0; ++j) {
      std::uint64_t next_gen = 0;
      for (std::uint64_t i = 0; i < gen; ++i) {
        sample_branching_vector(spec, rng, real);
        next_gen += real.n();
        if (total + next_gen > budget.max_nodes) break;
      }
      gen = next_gen;
      total += gen;
      if (total > budget.max_nodes) {
        total = budget.max_nodes;
        break;
      }
    }
    totals[t] = static_cast<double>(total);
  }
  const auto stats = mean_and_se(totals);
  return {stats.mean, stats.std_error, false};
}

}  // namespace sfpe
