#pragma once

#include <optional>
#include <span>
#include <string>

#include "sfpe/branching.hpp"

namespace sfpe {

enum class MapFamily { kLinear, kMax, kDiscountedTreeSum, kFreeEntropy };

// One of the Phi families together with its Lipschitz data.
struct SfpeMap {
  MapFamily family = MapFamily::kLinear;
  double beta = 0.0;             // FreeEntropy only
  bool linear_zero_mean = false; // Linear only: E[Q] = E[R^(0)] = 0 regime

  static SfpeMap linear(bool zero_mean = false) { return {MapFamily::kLinear, 0.0, zero_mean}; }
  static SfpeMap max() { return {MapFamily::kMax, 0.0, false}; }
  static SfpeMap discounted_tree_sum() { return {MapFamily::kDiscountedTreeSum, 0.0, false}; }
  static SfpeMap free_entropy(double beta) { return {MapFamily::kFreeEntropy, beta, false}; }

  std::string label() const;
};

const char* family_name(MapFamily f);
std::optional<MapFamily> parse_family(const std::string& name);

// f(x) = atanh(c * tanh(x)) with c = tanh(beta), switched to the logarithmic
// closed form for |x| > 18 where tanh saturates to 1 in doubles.
double free_entropy_kernel(double c, double x);

// Evaluates Phi on one realization. children.size() must equal real.n().
// Pure and deterministic; throws OverflowError on a non-finite result.
double apply_map(const SfpeMap& map, const BranchingRealization& real,
                 std::span<const double> children);

// The a.s.-Lipschitz weight function: phi(t) = |t| for all four families.
double phi(const SfpeMap& map, double c);

// Phi with all children zero, evaluated literally.
double map_at_zero(const SfpeMap& map, const BranchingRealization& real);

// Closed-form contraction constant H_p where one is known:
// (Quicksort, Linear) -> (p-1)/(p+1); (Find, DiscountedTreeSum) -> 2/(p+1);
// (Ising, FreeEntropy, p=1) -> E[N]*tanh(beta). Absent otherwise.
std::optional<double> closed_form_Hp(const SfpeMap& map,
                                     const BranchingVectorSpec& spec, double p);

}  // namespace sfpe
