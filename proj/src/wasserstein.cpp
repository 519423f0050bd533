#include "sfpe/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "sfpe/util.hpp"

namespace sfpe {

namespace {

double pow_abs(double d, double p) {
  const double a = std::fabs(d);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

double root_p(double v, double p) {
  if (p == 1.0) return v;
  if (p == 2.0) return std::sqrt(v);
  return std::pow(v, 1.0 / p);
}

void check_order(double p) {
  if (!(p >= 1.0)) throw std::domain_error("wasserstein: order p must be >= 1");
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("EmpiricalDistribution: need at least one sample");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("EmpiricalDistribution: non-finite sample");
  std::sort(values.begin(), values.end());
  values_ = std::move(values);
}

EmpiricalDistribution EmpiricalDistribution::from_sorted(std::vector<double> sorted) {
  if (sorted.empty())
    throw std::invalid_argument("EmpiricalDistribution: need at least one sample");
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!std::isfinite(sorted[i]))
      throw std::invalid_argument("EmpiricalDistribution: non-finite sample");
    if (i > 0 && sorted[i] < sorted[i - 1])
      throw std::invalid_argument("EmpiricalDistribution: values not sorted");
  }
  EmpiricalDistribution ed;
  ed.values_ = std::move(sorted);
  return ed;
}

double EmpiricalDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("quantile: u must lie in the open interval (0,1)");
  const auto n = values_.size();
  const double r = std::ceil(u * static_cast<double>(n));
  std::size_t idx = r < 1.0 ? 0 : static_cast<std::size_t>(r) - 1;
  if (idx >= n) idx = n - 1;
  return values_[idx];
}

double EmpiricalDistribution::cdf(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::abs_moment(double q) const {
  KahanSum s;
  for (double v : values_) s.add(std::pow(std::fabs(v), q));
  return s.value() / static_cast<double>(values_.size());
}

double EmpiricalDistribution::pos_part_norm(double q) const {
  KahanSum s;
  for (double v : values_) s.add(v > 0 ? std::pow(v, q) : 0.0);
  return std::pow(s.value() / static_cast<double>(values_.size()), 1.0 / q);
}

double EmpiricalDistribution::neg_part_norm(double q) const {
  KahanSum s;
  for (double v : values_) s.add(v < 0 ? std::pow(-v, q) : 0.0);
  return std::pow(s.value() / static_cast<double>(values_.size()), 1.0 / q);
}

double wasserstein_pow_equal_size(std::span<const double> a, std::span<const double> b,
                                  double p) {
  if (a.size() != b.size())
    throw std::invalid_argument("wasserstein_pow_equal_size: size mismatch");
  KahanSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(pow_abs(a[i] - b[i], p));
  return acc.value() / static_cast<double>(a.size());
}

double wasserstein_pow_merge(std::span<const double> a, std::span<const double> b,
                             double p) {
  const std::uint64_t n = a.size();
  const std::uint64_t m = b.size();
  // Breakpoints i/n and j/m live on the exact integer grid of 1/(n*m):
  // i/n = i*m and j/m = j*n. The quantile difference is constant between
  // consecutive breakpoints, so the integral is a finite sum.
  std::uint64_t ia = 0, ib = 0, t = 0;
  KahanSum acc;
  while (ia < n && ib < m) {
    const std::uint64_t ta = (ia + 1) * m;
    const std::uint64_t tb = (ib + 1) * n;
    const std::uint64_t tn = ta < tb ? ta : tb;
    acc.add(static_cast<double>(tn - t) * pow_abs(a[ia] - b[ib], p));
    t = tn;
    if (ta == tn) ++ia;
    if (tb == tn) ++ib;
  }
  return acc.value() / (static_cast<double>(n) * static_cast<double>(m));
}

double wasserstein_p_pow(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                         double p) {
  check_order(p);
  if (a.size() == b.size())
    return wasserstein_pow_equal_size(a.sorted_values(), b.sorted_values(), p);
  return wasserstein_pow_merge(a.sorted_values(), b.sorted_values(), p);
}

double wasserstein_p(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                     double p) {
  return root_p(wasserstein_p_pow(a, b, p), p);
}

TailBoundReport quantile_tail_bound_check(const EmpiricalDistribution& ed, double q,
                                          int grid) {
  if (!(q > 0.0)) throw std::domain_error("quantile_tail_bound_check: q must be > 0");
  if (grid < 1) throw std::domain_error("quantile_tail_bound_check: grid must be >= 1");
  TailBoundReport report;
  report.q = q;
  report.grid = grid;
  report.pos_norm = ed.pos_part_norm(q);
  report.neg_norm = ed.neg_part_norm(q);
  report.min_slack = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= grid; ++i) {
    const double u = (static_cast<double>(i) - 0.5) / static_cast<double>(grid);
    const double bound = report.pos_norm * std::pow(1.0 - u, -1.0 / q) +
                         report.neg_norm * std::pow(u, -1.0 / q);
    const double slack = bound - std::fabs(ed.quantile(u));
    report.min_slack = std::min(report.min_slack, slack);
    if (slack < 0.0) ++report.violations;
  }
  report.holds = report.violations == 0;
  return report;
}

MetricPropertyReport metric_axiom_suite(std::span<const EmpiricalDistribution> dists,
                                        double p) {
  return metric_axiom_suite(dists, p, p + 1.0);
}

MetricPropertyReport metric_axiom_suite(std::span<const EmpiricalDistribution> dists,
                                        double p, double q, double rel_tol) {
  if (dists.size() < 3)
    throw std::domain_error("metric_axiom_suite: need at least three distributions");
  check_order(p);
  if (!(q >= p)) throw std::domain_error("metric_axiom_suite: need q >= p");
  MetricPropertyReport report;
  auto note = [&](double violation, const std::string& msg) {
    report.max_rel_violation = std::max(report.max_rel_violation, violation);
    if (violation > rel_tol) {
      report.passed = false;
      report.failures.push_back(msg);
    }
  };
  const std::size_t n = dists.size();
  std::vector<double> dp(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dp[i * n + j] = wasserstein_p(dists[i], dists[j], p);
  }
  for (std::size_t i = 0; i < n; ++i) {
    ++report.checks;
    if (dp[i * n + i] != 0.0) note(1.0, "d_p(a,a) != 0 at index " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      ++report.checks;
      if (dp[i * n + j] != dp[j * n + i])
        note(1.0, "asymmetry at pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
      // d_p <= d_q for p <= q
      ++report.checks;
      const double dq = wasserstein_p(dists[i], dists[j], q);
      const double scale = std::max({dq, dp[i * n + j], 1e-300});
      note((dp[i * n + j] - dq) / scale,
           "d_p > d_q at pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t l = 0; l < n; ++l) {
        if (l == i || l == j) continue;
        ++report.checks;
        const double lhs = dp[i * n + l];
        const double rhs = dp[i * n + j] + dp[j * n + l];
        const double scale = std::max({lhs, rhs, 1e-300});
        note((lhs - rhs) / scale, "triangle violation at (" + std::to_string(i) + "," +
                                      std::to_string(j) + "," + std::to_string(l) + ")");
      }
    }
  return report;
}

}  // namespace sfpe
