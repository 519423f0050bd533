#include <doctest.h>

#include <cmath>

#include "sfpe/branching.hpp"
#include "sfpe/errors.hpp"
#include "sfpe/util.hpp"

using namespace sfpe;

TEST_CASE("quicksort realizations: n = 2, c = (u, 1-u), q from the u") {
  const auto spec = BranchingVectorSpec::quicksort();
  RandomStream rs(1);
  for (int i = 0; i < 1000; ++i) {
    const auto real = sample_branching_vector(spec, rs);
    REQUIRE(real.n() == 2);
    const double u = real.c[0];
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(real.c[1] == 1.0 - u);
    const double q = 2.0 * u * std::log(u) + 2.0 * (1.0 - u) * std::log1p(-u) + 1.0;
    CHECK(real.q == q);
  }
}

TEST_CASE("find realizations: n = 2, c = (u, 1-u), q = 1") {
  const auto spec = BranchingVectorSpec::find();
  RandomStream rs(2);
  for (int i = 0; i < 1000; ++i) {
    const auto real = sample_branching_vector(spec, rs);
    REQUIRE(real.n() == 2);
    CHECK(real.c[0] + real.c[1] == doctest::Approx(1.0));
    CHECK(real.q == 1.0);
  }
}

TEST_CASE("ising at beta 0 has all-zero weights") {
  const auto spec = BranchingVectorSpec::ising(0.0);
  RandomStream rs(3);
  const auto real = sample_branching_vector(spec, rs);
  for (double c : real.c) CHECK(c == 0.0);
}

TEST_CASE("ising weights are tanh(beta) in [0,1)") {
  const auto spec = BranchingVectorSpec::ising(0.7, PrimitiveLaw::poisson(3.0));
  RandomStream rs(4);
  volatile double beta = 0.7;  // keep tanh in the runtime libm, as the library does
  const double expected = std::tanh(beta);
  for (int i = 0; i < 200; ++i) {
    const auto real = sample_branching_vector(spec, rs);
    for (double c : real.c) {
      CHECK(c == expected);
      CHECK(c >= 0.0);
      CHECK(c < 1.0);
    }
  }
}

TEST_CASE("pagerank-like weights respect the cap") {
  const auto spec = BranchingVectorSpec::pagerank_like(0.5, 3.0);
  RandomStream rs(5);
  std::size_t total_n = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto real = sample_branching_vector(spec, rs);
    total_n += real.n();
    for (double c : real.c) CHECK(std::fabs(c) <= 0.5);
  }
  // E[N] = 3
  CHECK(static_cast<double>(total_n) / 2000.0 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("pagerank-like weights satisfy the moment relation") {
  // E|C_1|^p <= cap^p / E[N] for p in 1..6
  const double cap = 0.5, lambda = 30.0;
  const auto spec = BranchingVectorSpec::pagerank_like(cap, lambda);
  RandomStream rs(6);
  std::vector<KahanSum> sums(6);
  std::size_t weights_seen = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto real = sample_branching_vector(spec, rs);
    for (double c : real.c) {
      ++weights_seen;
      for (int p = 1; p <= 6; ++p) sums[p - 1].add(std::pow(std::fabs(c), p));
    }
  }
  for (int p = 1; p <= 6; ++p) {
    const double moment = sums[p - 1].value() / static_cast<double>(weights_seen);
    CHECK(moment <= std::pow(cap, p) / lambda * 1.05);
  }
}

TEST_CASE("validate_spec flags bad parameters") {
  auto ising = BranchingVectorSpec::ising(-1.0);
  auto report = validate_spec(ising);
  CHECK_FALSE(report.ok);
  REQUIRE(!report.errors.empty());
  CHECK(report.errors[0].find("beta") != std::string::npos);

  CHECK(validate_spec(BranchingVectorSpec::quicksort()).ok);

  auto pr = BranchingVectorSpec::pagerank_like(1.5, 3.0);
  CHECK_FALSE(validate_spec(pr).ok);

  auto custom = BranchingVectorSpec::custom(PrimitiveLaw::uniform(0, 3),
                                            PrimitiveLaw::constant(0),
                                            PrimitiveLaw::constant(0));
  CHECK_FALSE(validate_spec(custom).ok);  // non-integer offspring law
}

TEST_CASE("mean_offspring: exact for deterministic N, MC for Poisson") {
  RandomStream rs(7);
  CHECK(mean_offspring(BranchingVectorSpec::quicksort(), 1, rs) == 2.0);
  CHECK(mean_offspring(BranchingVectorSpec::find(), 1, rs) == 2.0);
  const auto custom = BranchingVectorSpec::custom(PrimitiveLaw::poisson(3.0),
                                                  PrimitiveLaw::constant(0),
                                                  PrimitiveLaw::constant(0));
  // Poisson mean 3, MC over 10^6 trials: 3 sigma is 3*sqrt(3/1e6) ~ 5.2e-3
  const double est = mean_offspring(custom, 1000000, rs);
  CHECK(std::fabs(est - 3.0) < 3.0 * std::sqrt(3.0 / 1e6));
  CHECK(*exact_mean_offspring(custom) == 3.0);
}

TEST_CASE("offspring cap turns runaway draws into a budget error") {
  auto custom = BranchingVectorSpec::custom(PrimitiveLaw::constant(100),
                                            PrimitiveLaw::constant(0),
                                            PrimitiveLaw::constant(0));
  custom.offspring_cap = 50;
  RandomStream rs(8);
  CHECK_THROWS_AS(sample_branching_vector(custom, rs), BudgetError);
}

TEST_CASE("equal seeds give bit-identical realization sequences") {
  const auto spec = BranchingVectorSpec::pagerank_like(0.4, 5.0);
  RandomStream a(99), b(99);
  for (int i = 0; i < 200; ++i) {
    const auto ra = sample_branching_vector(spec, a);
    const auto rb = sample_branching_vector(spec, b);
    REQUIRE(ra.n() == rb.n());
    CHECK(ra.q == rb.q);
    for (std::size_t j = 0; j < ra.n(); ++j) CHECK(ra.c[j] == rb.c[j]);
  }
}

TEST_CASE("quicksort Q has mean zero") {
  const auto spec = BranchingVectorSpec::quicksort();
  RandomStream rs(10);
  const std::size_t trials = 200000;
  std::vector<double> qs(trials);
  BranchingRealization real;
  for (auto& q : qs) {
    sample_branching_vector(spec, rs, real);
    q = real.q;
  }
  const auto stats = mean_and_se(qs);
  CHECK(std::fabs(stats.mean) < 4.0 * stats.std_error);
  // E[Q^2] = 7/3 - 2 pi^2/9, derived by direct integration of
  // (2u ln u + 2(1-u) ln(1-u) + 1)^2
  const double exact_q2 = 7.0 / 3.0 - 2.0 * 9.869604401089358 / 9.0;
  KahanSum sq;
  for (double q : qs) sq.add(q * q);
  const double q2 = sq.value() / static_cast<double>(trials);
  CHECK(q2 == doctest::Approx(exact_q2).epsilon(0.02));
}

TEST_CASE("spec params round-trip") {
  for (const auto& spec :
       {BranchingVectorSpec::quicksort(), BranchingVectorSpec::find(),
        BranchingVectorSpec::ising(0.3, PrimitiveLaw::poisson(2.0),
                                   PrimitiveLaw::uniform(0, 1)),
        BranchingVectorSpec::pagerank_like(0.6, 4.0),
        BranchingVectorSpec::custom(PrimitiveLaw::poisson(2.0), PrimitiveLaw::constant(0),
                                    PrimitiveLaw::uniform(0, 1))}) {
    const auto params = spec.to_params();
    const auto again = BranchingVectorSpec::from_params(kind_name(spec.kind), params);
    CHECK(again.kind == spec.kind);
    CHECK(again.label() == spec.label());
  }
  CHECK_THROWS_AS(BranchingVectorSpec::from_params("ising", {}), ConfigError);
  CHECK_THROWS_AS(BranchingVectorSpec::from_params("quicksort", {{"beta", "1"}}),
                  ConfigError);
  CHECK_THROWS_AS(BranchingVectorSpec::from_params("ising", {{"beta", "1"},
                                                             {"ofspring", "constant:2"}}),
                  ConfigError);
}
