#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sfpe/rng.hpp"

namespace sfpe {

// Composable scalar law used by custom branching specs and by mu_0.
// Text form: constant:v | uniform:a,b | bernoulli:p | poisson:lambda |
// geometric:p | fnofu:identity|neglog,a,b  (the last is g(U) = a + b*f(U)
// for a uniform draw U).
struct PrimitiveLaw {
  enum class Kind { kConstant, kUniform, kBernoulli, kPoisson, kGeometric, kFnOfUniform };
  enum class Fn { kIdentity, kNegLog };

  Kind kind = Kind::kConstant;
  double a = 0.0;
  double b = 0.0;
  Fn fn = Fn::kIdentity;

  double sample(RandomStream& rng) const;

  // Whether every realization is a nonnegative integer (offspring laws).
  bool integer_valued() const;
  std::optional<double> mean() const;
  // E|X|^p where a closed form is cheap; nullopt means estimate numerically.
  std::optional<double> abs_moment(double p) const;

  std::string to_string() const;
  static PrimitiveLaw parse(std::string_view text);

  static PrimitiveLaw constant(double v) { return {Kind::kConstant, v, 0.0, Fn::kIdentity}; }
  static PrimitiveLaw uniform(double lo, double hi) { return {Kind::kUniform, lo, hi, Fn::kIdentity}; }
  static PrimitiveLaw bernoulli(double p) { return {Kind::kBernoulli, p, 0.0, Fn::kIdentity}; }
  static PrimitiveLaw poisson(double lambda) { return {Kind::kPoisson, lambda, 0.0, Fn::kIdentity}; }
  static PrimitiveLaw geometric(double p) { return {Kind::kGeometric, p, 0.0, Fn::kIdentity}; }
  static PrimitiveLaw fn_of_uniform(Fn f, double shift, double scale) {
    return {Kind::kFnOfUniform, shift, scale, f};
  }
};

// Initial distribution mu_0 for the level-0 pool and the oracle leaves.
// Restricted to laws with all absolute moments finite.
struct InitialDistribution {
  enum class Kind { kPointMass, kUniform, kLaw };

  Kind kind = Kind::kPointMass;
  double a = 0.0;
  double b = 0.0;
  PrimitiveLaw law;

  double draw(RandomStream& rng) const;
  // E|X|^p; closed form for point/uniform, law-dependent otherwise.
  std::optional<double> abs_moment(double p) const;

  std::string to_string() const;
  // point:x | uniform:a,b | law:<primitive law>
  static InitialDistribution parse(std::string_view text);

  static InitialDistribution point_mass(double x0) {
    return {Kind::kPointMass, x0, 0.0, {}};
  }
  static InitialDistribution uniform(double lo, double hi) {
    return {Kind::kUniform, lo, hi, {}};
  }
  static InitialDistribution from_law(const PrimitiveLaw& l) {
    return {Kind::kLaw, 0.0, 0.0, l};
  }
};

}  // namespace sfpe
