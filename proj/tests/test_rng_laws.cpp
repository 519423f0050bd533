#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "sfpe/laws.hpp"
#include "sfpe/rng.hpp"
#include "sfpe/util.hpp"

using namespace sfpe;

TEST_CASE("streams with equal seeds are bit-identical") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("u01 stays inside the open unit interval") {
  RandomStream rs(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = rs.u01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("substream seeds separate coordinates") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a)
    for (std::uint64_t b = 0; b < 50; ++b)
      seen.insert(substream_seed(1, StreamDomain::kPopDyn, a, b));
  CHECK(seen.size() == 2500);
  CHECK(substream_seed(1, StreamDomain::kPopDyn, 2, 3) !=
        substream_seed(1, StreamDomain::kOracle, 2, 3));
  CHECK(substream_seed(1, StreamDomain::kPopDyn, 2, 3) !=
        substream_seed(2, StreamDomain::kPopDyn, 2, 3));
}

TEST_CASE("uniform_index covers [0,n) and n=1 is constant") {
  RandomStream rs(11);
  for (int i = 0; i < 100; ++i) CHECK(rs.uniform_index(1) == 0);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 100000; ++i) ++counts[rs.uniform_index(10)];
  for (int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}

TEST_CASE("primitive law sampling matches analytic means") {
  RandomStream rs(5);
  const std::size_t trials = 200000;
  auto mc_mean = [&](const PrimitiveLaw& law) {
    KahanSum s;
    for (std::size_t i = 0; i < trials; ++i) s.add(law.sample(rs));
    return s.value() / static_cast<double>(trials);
  };
  const auto laws = {
      PrimitiveLaw::constant(3.5),     PrimitiveLaw::uniform(-1.0, 2.0),
      PrimitiveLaw::bernoulli(0.3),    PrimitiveLaw::poisson(3.0),
      PrimitiveLaw::geometric(0.4),
      PrimitiveLaw::fn_of_uniform(PrimitiveLaw::Fn::kNegLog, 1.0, 2.0),
  };
  for (const auto& law : laws) {
    const auto mean = law.mean();
    REQUIRE(mean.has_value());
    // generous 5-sigma-ish bands for bounded/light-tailed laws
    CHECK(std::fabs(mc_mean(law) - *mean) < 0.05 * std::max(1.0, std::fabs(*mean)));
  }
}

TEST_CASE("law text round-trips") {
  for (const char* text : {"constant:2", "uniform:-0.5,0.5", "bernoulli:0.25",
                           "poisson:3", "geometric:0.5", "fnofu:neglog,0,1"}) {
    const auto law = PrimitiveLaw::parse(text);
    const auto again = PrimitiveLaw::parse(law.to_string());
    CHECK(law.kind == again.kind);
    CHECK(law.a == doctest::Approx(again.a));
    CHECK(law.b == doctest::Approx(again.b));
  }
  CHECK_THROWS(PrimitiveLaw::parse("magic:1"));
  CHECK_THROWS(PrimitiveLaw::parse("uniform:2,1"));
  CHECK_THROWS(PrimitiveLaw::parse("bernoulli:1.5"));
}

TEST_CASE("initial distribution moments") {
  const auto point = InitialDistribution::point_mass(-2.0);
  CHECK(*point.abs_moment(2.0) == doctest::Approx(4.0));
  const auto unif = InitialDistribution::uniform(-1.0, 1.0);
  // E|X|^2 over U(-1,1) = 1/3
  CHECK(*unif.abs_moment(2.0) == doctest::Approx(1.0 / 3.0));
  RandomStream rs(3);
  for (int i = 0; i < 100; ++i) {
    const double v = unif.draw(rs);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  const auto parsed = InitialDistribution::parse("uniform:-1,1");
  CHECK(parsed.kind == InitialDistribution::Kind::kUniform);
  CHECK(InitialDistribution::parse("point:0").kind == InitialDistribution::Kind::kPointMass);
  CHECK(InitialDistribution::parse("law:poisson:2").kind == InitialDistribution::Kind::kLaw);
  CHECK_THROWS(InitialDistribution::parse("gauss:0,1"));
}

TEST_CASE("linear fit recovers a line") {
  std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto fit = fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("parallel_for_ranges covers the index space once") {
  std::vector<int> hits(1000, 0);
  parallel_for_ranges(1000, 4, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) ++hits[i];
  });
  for (int h : hits) CHECK(h == 1);
}
