#include "sfpe/maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sfpe/errors.hpp"

namespace sfpe {

const char* family_name(MapFamily f) {
  switch (f) {
    case MapFamily::kLinear:
      return "linear";
    case MapFamily::kMax:
      return "max";
    case MapFamily::kDiscountedTreeSum:
      return "discounted-tree-sum";
    case MapFamily::kFreeEntropy:
      return "free-entropy";
  }
  return "?";
}

std::optional<MapFamily> parse_family(const std::string& name) {
  if (name == "linear") return MapFamily::kLinear;
  if (name == "max") return MapFamily::kMax;
  if (name == "discounted-tree-sum") return MapFamily::kDiscountedTreeSum;
  if (name == "free-entropy") return MapFamily::kFreeEntropy;
  return {};
}

std::string SfpeMap::label() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "family=" << family_name(family);
  if (family == MapFamily::kFreeEntropy) os << ";beta=" << beta;
  if (family == MapFamily::kLinear && linear_zero_mean) os << ";zero_mean=true";
  return os.str();
}

double free_entropy_kernel(double c, double x) {
  if (c == 0.0) return 0.0;
  const double ax = std::fabs(x);
  if (ax > 18.0) {
    // tanh(x) rounds to +-1 past ~19; the equivalent log form
    //   (1/2) log( (e^{2x}(1+c) + 1-c) / (e^{2x}(1-c) + 1+c) )
    // rewritten in e^{-2|x|} stays finite and accurate.
    const double e = std::exp(-2.0 * ax);
    const double v =
        0.5 * std::log(((1.0 + c) + (1.0 - c) * e) / ((1.0 - c) + (1.0 + c) * e));
    return x < 0.0 ? -v : v;
  }
  return std::atanh(c * std::tanh(x));
}

double apply_map(const SfpeMap& map, const BranchingRealization& real,
                 std::span<const double> children) {
  if (children.size() != real.n())
    throw std::invalid_argument("apply_map: children count does not match N");
  double value = real.q;
  switch (map.family) {
    case MapFamily::kLinear:
      for (std::size_t i = 0; i < children.size(); ++i)
        value += real.c[i] * children[i];
      break;
    case MapFamily::kMax:
      for (std::size_t i = 0; i < children.size(); ++i)
        value = std::max(value, real.c[i] * children[i]);
      break;
    case MapFamily::kDiscountedTreeSum: {
      // Empty maximum at N = 0 is taken as 0, so the result is q.
      if (!children.empty()) {
        double best = real.c[0] * children[0];
        for (std::size_t i = 1; i < children.size(); ++i)
          best = std::max(best, real.c[i] * children[i]);
        value += best;
      }
      break;
    }
    case MapFamily::kFreeEntropy: {
      const double c = std::tanh(map.beta);
      for (const double x : children) value += free_entropy_kernel(c, x);
      break;
    }
  }
  if (!std::isfinite(value))
    throw OverflowError("apply_map: non-finite result for family " +
                        std::string(family_name(map.family)));
  return value;
}

double phi(const SfpeMap&, double c) { return std::fabs(c); }

double map_at_zero(const SfpeMap& map, const BranchingRealization& real) {
  const std::vector<double> zeros(real.n(), 0.0);
  return apply_map(map, real, zeros);
}

std::optional<double> closed_form_Hp(const SfpeMap& map, const BranchingVectorSpec& spec,
                                     double p) {
  if (p < 1.0) throw std::domain_error("closed_form_Hp: p must be >= 1");
  using Kind = BranchingVectorSpec::Kind;
  if (map.family == MapFamily::kLinear && spec.kind == Kind::kQuicksort)
    return (p - 1.0) / (p + 1.0);
  if (map.family == MapFamily::kDiscountedTreeSum && spec.kind == Kind::kFind)
    return 2.0 / (p + 1.0);
  if (map.family == MapFamily::kFreeEntropy && spec.kind == Kind::kIsing && p == 1.0) {
    if (auto mean_n = exact_mean_offspring(spec))
      return *mean_n * std::tanh(spec.beta);
  }
  return {};
}

}  // namespace sfpe
