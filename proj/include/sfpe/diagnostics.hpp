#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfpe/branching.hpp"
#include "sfpe/laws.hpp"
#include "sfpe/maps.hpp"
#include "sfpe/popdyn.hpp"
#include "sfpe/wbp.hpp"

namespace sfpe {

struct HpEstimate {
  double value = 0.0;       // closed form when known, else the generic bound
  double std_error = 0.0;
  bool closed_form = false;
  // The generic construction 2 E[(sum_r phi(C_r))^p], always reported; it is
  // an upper-bound recipe and can be much looser than the closed form.
  double generic_value = 0.0;
  double generic_std_error = 0.0;
};

HpEstimate estimate_Hp(const SfpeMap& map, const BranchingVectorSpec& spec, double p,
                       std::size_t trials, RandomStream& rng);

struct RhoEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool analytic = false;
};

// rho_beta = E[sum_{i<=N} |C_i|^beta]; analytic for the built-ins with a
// closed form, Monte Carlo otherwise. beta > 0.
RhoEstimate rho_beta(const BranchingVectorSpec& spec, double beta, std::size_t trials,
                     RandomStream& rng);

struct MomentBoundResult {
  double bound = 0.0;      // A_p * sum_{i<k} (H_p^{1/p})^i; 0 when k = 0
  double a_p = 0.0;
  double hp = 0.0;
  double mu0_norm = 0.0;      // (E|R^(0)|^p)^{1/p}
  double phi_zero_norm = 0.0; // (E|Phi(Q,N,{C},{0})|^p)^{1/p}
  double std_error = 0.0;     // propagated onto the bound
};

MomentBoundResult moment_bound(const SfpeMap& map, const BranchingVectorSpec& spec,
                               double p, int k, const InitialDistribution& init,
                               std::size_t trials, RandomStream& rng);

// Evaluates ( sum_{r<=k} (H_p^{1/p})^r )^{p-1} *
//           sum_{j<=k} (H_p^{1/p})^{k-j} e_j
// where e_j estimates E[d_p(F_{j,m}, F_j)^p]. errors.size() must be k+1.
double mean_convergence_bound(double hp, double p, int k,
                              std::span<const double> per_level_errors);

// min{(q-p)/q, 1/2}; requires q > p >= 1 and q != 2p.
double rate_exponent(double p, double q);

struct ConvergenceExperimentConfig {
  double p = 1.0;
  int k = 5;
  std::vector<std::size_t> m_grid;
  int replications = 20;
  std::size_t oracle_size = 100'000;
  std::uint64_t seed = 1;
  InitialDistribution init = InitialDistribution::point_mass(0.0);
  std::optional<double> q;  // moment order for the rate assertion
  int threads = 1;
  std::size_t constant_trials = 200'000;  // MC size for H_p, rho, A_p
  OracleBudget budget;
  double slope_slack = 0.2;
  double se_multiplier = 3.0;
};

struct PerMRow {
  std::size_t m = 0;
  int replications = 0;
  double mean_dist_pow = 0.0;  // mean d_p(pool_k, ref)^p over replications
  double std_error = 0.0;
  std::vector<double> iid_errors;     // e_j for j = 0..k at this m
  std::vector<double> iid_errors_se;
  double bound = 0.0;
  double bound_se = 0.0;
  bool dominance_ok = true;
};

struct DiagnosticsReport {
  double p = 1.0;
  int k = 0;
  std::size_t oracle_size = 0;
  std::uint64_t seed = 0;
  HpEstimate hp;
  RhoEstimate rho_1;
  RhoEstimate rho_p;
  MomentBoundResult moment;
  double c_p = 0.0;           // geometric convergence rate of the distributional iteration
  std::string c_p_condition;  // which condition produced c_p
  std::vector<PerMRow> per_m;
  // Propagated error bound as a function of recursion depth, evaluated at the
  // largest m in the grid: (depth, bound).
  std::vector<std::pair<int, double>> bound_values;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::optional<double> theoretical_exponent;
  bool slope_ok = true;
  bool dominance_ok = true;
  std::vector<std::string> notes;
};

// Builds oracle references F~_j (size M) for every level, measures
// d_p(pool_k, F~_k)^p over the m-grid with fresh popdyn runs, runs the
// i.i.d. arm (fresh size-m oracle samples against the references), fits the
// log-log rate and evaluates the propagated error bound per m.
DiagnosticsReport run_convergence_experiment(const SfpeMap& map,
                                             const BranchingVectorSpec& spec,
                                             const ConvergenceExperimentConfig& cfg);

struct ContractionRatio {
  int level = 0;       // j: ratio of d(F_j, F_{j-1}) to d(F_{j-1}, F_{j-2})
  double ratio = 0.0;
  bool defined = true; // false when the denominator is numerically zero
  double dist = 0.0;   // d_p(F_j, F_{j-1})
};

// Oracle empiricals of size M for levels 0..k (nested coupling through a
// shared seed) and the successive distance ratios for j = 2..k.
std::vector<ContractionRatio> contraction_check(
    const SfpeMap& map, const BranchingVectorSpec& spec, double p, int k,
    std::size_t M, std::uint64_t seed,
    const InitialDistribution& init = InitialDistribution::point_mass(0.0),
    const OracleBudget& budget = {}, int threads = 1);

// Plug-in estimators over a pool.
struct FunctionalSpec {
  enum class Kind { kMoment, kAbsMoment, kIndicator, kPolynomial };

  Kind kind = Kind::kMoment;
  double order = 1.0;
  double threshold = 0.0;
  std::vector<double> coeffs;  // polynomial, ascending powers

  double operator()(double x) const;

  static FunctionalSpec moment(double r) { return {Kind::kMoment, r, 0.0, {}}; }
  static FunctionalSpec abs_moment(double r) { return {Kind::kAbsMoment, r, 0.0, {}}; }
  static FunctionalSpec indicator_leq(double t) { return {Kind::kIndicator, 0.0, t, {}}; }
  static FunctionalSpec polynomial(std::vector<double> coeffs) {
    return {Kind::kPolynomial, 0.0, 0.0, std::move(coeffs)};
  }
};

struct FunctionalEstimate {
  double value = 0.0;
  // Nonparametric bootstrap over the pool. Heuristic: pool entries are
  // dependent, so this is a diagnostic error bar, not a calibrated CI.
  double bootstrap_se = 0.0;
};

FunctionalEstimate estimate_functional(const SamplePool& pool, const FunctionalSpec& h,
                                       int bootstrap_reps = 200,
                                       std::uint64_t seed = 0x5eed);

std::vector<double> estimate_quantiles(const SamplePool& pool,
                                       std::span<const double> probs);

}  // namespace sfpe
