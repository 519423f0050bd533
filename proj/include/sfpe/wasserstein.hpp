#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sfpe {

// Finitely supported distribution held as sorted order statistics.
class EmpiricalDistribution {
 public:
  // Sorts a copy of the values; throws on empty or non-finite input.
  explicit EmpiricalDistribution(std::vector<double> values);
  static EmpiricalDistribution from_sorted(std::vector<double> sorted);

  std::size_t size() const { return values_.size(); }
  std::span<const double> sorted_values() const { return values_; }

  // Left-continuous generalized inverse of the right-continuous empirical
  // CDF: the smallest x with F(x) >= u, i.e. order statistic ceil(u*n).
  // Throws std::domain_error unless 0 < u < 1.
  double quantile(double u) const;

  double cdf(double x) const;
  double abs_moment(double q) const;       // (1/n) sum |x_i|^q
  double pos_part_norm(double q) const;    // ||X+||_q
  double neg_part_norm(double q) const;    // ||X-||_q

 private:
  EmpiricalDistribution() = default;
  std::vector<double> values_;
};

// Exact d_p via the quantile-coupling representation. Dispatches to the
// equal-size pairing when sizes match and to the merged-breakpoint
// integration otherwise. p >= 1.
double wasserstein_p(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                     double p);
// d_p^p (skips the final root).
double wasserstein_p_pow(const EmpiricalDistribution& a,
                         const EmpiricalDistribution& b, double p);

// The two integration routes, exposed for cross-verification. Both compute
// d_p^p exactly; the merge route integrates over the breakpoint grid
// {i/n} U {j/m} using integer positions in units of 1/(n*m).
double wasserstein_pow_equal_size(std::span<const double> a, std::span<const double> b,
                                  double p);
double wasserstein_pow_merge(std::span<const double> a, std::span<const double> b,
                             double p);

struct TailBoundReport {
  double q = 0.0;
  int grid = 0;
  double pos_norm = 0.0;
  double neg_norm = 0.0;
  double min_slack = 0.0;       // min over the grid of bound - |quantile|
  std::size_t violations = 0;   // grid points with negative slack
  bool holds = true;
};

// Checks |F^-1(u)| <= ||X+||_q (1-u)^{-1/q} + ||X-||_q u^{-1/q} at the grid
// midpoints u = (i - 1/2)/grid, with the norms taken from ed itself.
TailBoundReport quantile_tail_bound_check(const EmpiricalDistribution& ed, double q,
                                          int grid);

struct MetricPropertyReport {
  bool passed = true;
  std::size_t checks = 0;
  double max_rel_violation = 0.0;
  std::vector<std::string> failures;
};

// Metric axioms on a set of distributions: d_p(a,a) = 0 and symmetry exact,
// triangle inequality and d_p <= d_q (p <= q) within rel_tol.
MetricPropertyReport metric_axiom_suite(std::span<const EmpiricalDistribution> dists,
                                        double p, double q,
                                        double rel_tol = 1e-10);
// Monotonicity checked against q = p + 1.
MetricPropertyReport metric_axiom_suite(std::span<const EmpiricalDistribution> dists,
                                        double p);

}  // namespace sfpe
