#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "sfpe/rng.hpp"
#include "sfpe/wasserstein.hpp"

using namespace sfpe;

TEST_CASE("quantile follows the inf convention") {
  const EmpiricalDistribution ed(std::vector<double>{3.0, 1.0, 2.0});
  CHECK(ed.quantile(0.5) == 2.0);
  CHECK(ed.quantile(1.0 / 3.0) == 1.0);
  CHECK(ed.quantile(0.999) == 3.0);
  CHECK(ed.quantile(0.001) == 1.0);
  CHECK_THROWS_AS(ed.quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(ed.quantile(1.0), std::domain_error);

  const EmpiricalDistribution point(std::vector<double>(5, 4.25));
  for (double u : {0.01, 0.37, 0.5, 0.99}) CHECK(point.quantile(u) == 4.25);
}

TEST_CASE("quantile equals the scan-based definition on random samples") {
  RandomStream rs(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rs.uniform_index(40);
    std::vector<double> values(n);
    for (auto& v : values) v = std::floor(rs.u01() * 10.0);  // ties likely
    const EmpiricalDistribution ed(values);
    for (int i = 0; i < 50; ++i) {
      const double u = rs.u01();
      CHECK(ed.quantile(u) == testing_oracles::quantile_by_scan(ed.sorted_values(), u));
    }
  }
}

TEST_CASE("quantile is nondecreasing and left-continuous on the grid") {
  RandomStream rs(2);
  std::vector<double> values(37);
  for (auto& v : values) v = rs.u01() * 10.0;
  const EmpiricalDistribution ed(values);
  const auto n = values.size();
  double prev = ed.quantile(1e-9);
  for (std::size_t i = 1; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n);
    // at grid point i/n the inf-quantile equals the i-th order statistic
    CHECK(ed.quantile(u) == ed.sorted_values()[i - 1]);
    CHECK(ed.quantile(u) >= prev);
    prev = ed.quantile(u);
  }
}

TEST_CASE("wasserstein worked examples") {
  const EmpiricalDistribution a(std::vector<double>{0.0, 2.0});
  const EmpiricalDistribution b(std::vector<double>{1.0, 3.0});
  CHECK(wasserstein_p(a, b, 1.0) == doctest::Approx(1.0));

  const EmpiricalDistribution p0(std::vector<double>{0.0});
  const EmpiricalDistribution p1(std::vector<double>{1.0});
  for (double p : {1.0, 2.0, 3.5}) CHECK(wasserstein_p(p0, p1, p) == doctest::Approx(1.0));

  // unequal sizes: {0} vs {0,1} at p=1 integrates to 1/2
  const EmpiricalDistribution c(std::vector<double>{0.0, 1.0});
  CHECK(wasserstein_p(p0, c, 1.0) == doctest::Approx(0.5));

  CHECK(wasserstein_p(a, a, 2.0) == 0.0);
}

TEST_CASE("equal-size path agrees with the merge path") {
  RandomStream rs(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rs.uniform_index(300);
    const auto av = testing_oracles::random_sample(rs, n, trial);
    const auto bv = testing_oracles::random_sample(rs, n, trial + 1);
    const EmpiricalDistribution a(av), b(bv);
    const double p = 1.0 + 2.0 * rs.u01();
    const double fast = wasserstein_pow_equal_size(a.sorted_values(), b.sorted_values(), p);
    const double merge = wasserstein_pow_merge(a.sorted_values(), b.sorted_values(), p);
    CHECK(fast == doctest::Approx(merge).epsilon(1e-12));
  }
}

TEST_CASE("merge path agrees with the Riemann-sum oracle") {
  RandomStream rs(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rs.uniform_index(200);
    const std::size_t m = 2 + rs.uniform_index(500);
    const EmpiricalDistribution a(testing_oracles::random_sample(rs, n, trial));
    const EmpiricalDistribution b(testing_oracles::random_sample(rs, m, trial + 2));
    const double p = trial % 2 ? 2.0 : 1.0;
    const double exact = wasserstein_p_pow(a, b, p);
    const double approx = testing_oracles::riemann_dp_pow(a, b, p, 200000);
    CHECK(exact == doctest::Approx(approx).epsilon(2e-3));
  }
}

TEST_CASE("translation and scaling invariances") {
  RandomStream rs(5);
  // exact translation on a dyadic grid: sums stay representable
  std::vector<double> av(64), bv(64);
  for (auto& v : av) v = static_cast<double>(rs.uniform_index(1 << 20)) / 1024.0;
  for (auto& v : bv) v = static_cast<double>(rs.uniform_index(1 << 20)) / 1024.0;
  const double t = static_cast<double>(rs.uniform_index(1 << 20)) / 1024.0;
  auto shift = [&](std::vector<double> xs, double delta) {
    for (auto& x : xs) x += delta;
    return xs;
  };
  const EmpiricalDistribution a(av), b(bv);
  const EmpiricalDistribution at(shift(av, t)), bt(shift(bv, t));
  CHECK(wasserstein_p(at, bt, 2.0) == wasserstein_p(a, b, 2.0));

  // scaling: d_p(s a, s b) = |s| d_p(a, b) within 1e-12 relative
  const double s = -2.7;
  auto scale = [&](std::vector<double> xs) {
    for (auto& x : xs) x *= s;
    return xs;
  };
  const EmpiricalDistribution as(scale(av)), bs(scale(bv));
  CHECK(wasserstein_p(as, bs, 2.0) ==
        doctest::Approx(std::fabs(s) * wasserstein_p(a, b, 2.0)).epsilon(1e-12));
}

TEST_CASE("metric axioms on point masses and random samples") {
  std::vector<EmpiricalDistribution> points;
  points.emplace_back(std::vector<double>{0.0});
  points.emplace_back(std::vector<double>{1.0});
  points.emplace_back(std::vector<double>{2.0});
  const auto report = metric_axiom_suite(points, 1.0, 2.0);
  CHECK(report.passed);
  // triangle is tight for collinear point masses
  CHECK(wasserstein_p(points[0], points[2], 1.0) ==
        doctest::Approx(wasserstein_p(points[0], points[1], 1.0) +
                        wasserstein_p(points[1], points[2], 1.0)));

  RandomStream rs(6);
  std::vector<EmpiricalDistribution> dists;
  for (int i = 0; i < 6; ++i)
    dists.emplace_back(testing_oracles::random_sample(rs, 100, i));
  const auto r2 = metric_axiom_suite(dists, 1.0, 2.0);
  CHECK(r2.passed);
  CHECK(r2.checks > 100);

  CHECK_THROWS_AS(metric_axiom_suite(std::span<const EmpiricalDistribution>(dists.data(), 2),
                                     1.0, 2.0),
                  std::domain_error);
}

TEST_CASE("tail bound report on the worked example") {
  const EmpiricalDistribution ed(std::vector<double>{-1.0, 1.0});
  // q=1: ||X+|| = ||X-|| = 1/2; at u=0.25 the bound is 0.5/0.75 + 0.5/0.25 = 8/3
  const auto report = quantile_tail_bound_check(ed, 1.0, 2);
  CHECK(report.pos_norm == doctest::Approx(0.5));
  CHECK(report.neg_norm == doctest::Approx(0.5));
  CHECK(report.holds);
  const double bound_at_quarter = 0.5 / 0.75 + 0.5 / 0.25;
  CHECK(bound_at_quarter == doctest::Approx(8.0 / 3.0));
  CHECK(report.min_slack <= bound_at_quarter - 1.0 + 1e-12);

  const EmpiricalDistribution zero(std::vector<double>{0.0, 0.0});
  const auto zr = quantile_tail_bound_check(zero, 1.0, 10);
  CHECK(zr.holds);
  CHECK(zr.min_slack == 0.0);  // equality case
}

TEST_CASE("tail bound holds on random empirical distributions") {
  RandomStream rs(7);
  for (int trial = 0; trial < 20; ++trial) {
    const EmpiricalDistribution ed(
        testing_oracles::random_sample(rs, 50 + rs.uniform_index(200), trial));
    for (double q : {1.0, 2.0}) {
      const auto report = quantile_tail_bound_check(ed, q, 500);
      CHECK(report.holds);
      CHECK(report.violations == 0);
    }
  }
}

TEST_CASE("construction rejects bad inputs") {
  CHECK_THROWS(EmpiricalDistribution(std::vector<double>{}));
  CHECK_THROWS(EmpiricalDistribution(std::vector<double>{1.0, std::nan("")}));
  CHECK_THROWS(EmpiricalDistribution::from_sorted(std::vector<double>{2.0, 1.0}));
  CHECK_THROWS(wasserstein_p(EmpiricalDistribution(std::vector<double>{1.0}),
                             EmpiricalDistribution(std::vector<double>{1.0}), 0.5));
}

TEST_CASE("cdf matches counting") {
  const EmpiricalDistribution ed(std::vector<double>{1.0, 2.0, 2.0, 5.0});
  CHECK(ed.cdf(0.0) == 0.0);
  CHECK(ed.cdf(1.0) == 0.25);
  CHECK(ed.cdf(2.0) == 0.75);
  CHECK(ed.cdf(10.0) == 1.0);
}
