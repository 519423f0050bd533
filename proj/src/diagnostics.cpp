#include "sfpe/diagnostics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sfpe/errors.hpp"
#include "sfpe/util.hpp"
#include "sfpe/wasserstein.hpp"

namespace sfpe {

namespace {

double pow_abs(double x, double p) {
  const double a = std::fabs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// Analytic rho_beta for the built-ins that admit one.
std::optional<double> analytic_rho(const BranchingVectorSpec& spec, double beta) {
  using Kind = BranchingVectorSpec::Kind;
  switch (spec.kind) {
    case Kind::kQuicksort:
    case Kind::kFind:
      // E[U^beta + (1-U)^beta] = 2/(beta+1)
      return 2.0 / (beta + 1.0);
    case Kind::kIsing:
      if (auto n = exact_mean_offspring(spec))
        return *n * std::pow(std::tanh(spec.beta), beta);
      return {};
    case Kind::kPageRankLike: {
      // C ~ Uniform[-a, a]: E|C|^beta = a^beta/(beta+1)
      const double a = spec.cap * std::min(1.0, 2.0 / spec.mean_offspring_param);
      return spec.mean_offspring_param * std::pow(a, beta) / (beta + 1.0);
    }
    case Kind::kCustom:
      return {};
  }
  return {};
}

}  // namespace

HpEstimate estimate_Hp(const SfpeMap& map, const BranchingVectorSpec& spec, double p,
                       std::size_t trials, RandomStream& rng) {
  if (p < 1.0) throw std::domain_error("estimate_Hp: p must be >= 1");
  if (trials < 1) throw std::invalid_argument("estimate_Hp: trials must be >= 1");
  HpEstimate est;

  // Generic construction 2 E[(sum phi(C_r))^p], always evaluated.
  std::vector<double> samples(trials);
  BranchingRealization real;
  for (std::size_t t = 0; t < trials; ++t) {
    sample_branching_vector(spec, rng, real);
    KahanSum s;
    for (double c : real.c) s.add(phi(map, c));
    samples[t] = pow_abs(s.value(), p);
  }
  const auto stats = mean_and_se(samples);
  est.generic_value = 2.0 * stats.mean;
  est.generic_std_error = 2.0 * stats.std_error;

  if (auto closed = closed_form_Hp(map, spec, p)) {
    est.value = *closed;
    est.std_error = 0.0;
    est.closed_form = true;
  } else {
    est.value = est.generic_value;
    est.std_error = est.generic_std_error;
    est.closed_form = false;
  }
  return est;
}

RhoEstimate rho_beta(const BranchingVectorSpec& spec, double beta, std::size_t trials,
                     RandomStream& rng) {
  if (!(beta > 0.0)) throw std::domain_error("rho_beta: beta must be > 0");
  if (auto v = analytic_rho(spec, beta)) return {*v, 0.0, true};
  std::vector<double> samples(trials);
  BranchingRealization real;
  for (std::size_t t = 0; t < trials; ++t) {
    sample_branching_vector(spec, rng, real);
    KahanSum s;
    for (double c : real.c) s.add(pow_abs(c, beta));
    samples[t] = s.value();
  }
  const auto stats = mean_and_se(samples);
  return {stats.mean, stats.std_error, false};
}

MomentBoundResult moment_bound(const SfpeMap& map, const BranchingVectorSpec& spec,
                               double p, int k, const InitialDistribution& init,
                               std::size_t trials, RandomStream& rng) {
  if (p < 1.0) throw std::domain_error("moment_bound: p must be >= 1");
  if (k < 0) throw std::domain_error("moment_bound: k must be >= 0");
  MomentBoundResult res;
  res.hp = estimate_Hp(map, spec, p, trials, rng).value;
  const double h = std::pow(res.hp, 1.0 / p);

  // mu_0 moment: analytic for the built-in laws, Monte Carlo otherwise.
  double mu0_se = 0.0;
  if (auto mom = init.abs_moment(p)) {
    res.mu0_norm = std::pow(*mom, 1.0 / p);
  } else {
    std::vector<double> draws(trials);
    for (auto& d : draws) {
      const double x = init.draw(rng);
      d = pow_abs(x, p);
    }
    const auto stats = mean_and_se(draws);
    res.mu0_norm = std::pow(stats.mean, 1.0 / p);
    if (stats.mean > 0.0)
      mu0_se = stats.std_error * res.mu0_norm / (p * stats.mean);
  }

  // Phi-at-zero moment by Monte Carlo.
  std::vector<double> zeros_mom(trials);
  BranchingRealization real;
  for (std::size_t t = 0; t < trials; ++t) {
    sample_branching_vector(spec, rng, real);
    zeros_mom[t] = pow_abs(map_at_zero(map, real), p);
  }
  const auto stats = mean_and_se(zeros_mom);
  res.phi_zero_norm = std::pow(stats.mean, 1.0 / p);
  double phi0_se = 0.0;
  if (stats.mean > 0.0)
    phi0_se = stats.std_error * res.phi_zero_norm / (p * stats.mean);

  res.a_p = (h + 1.0) * res.mu0_norm + res.phi_zero_norm;
  double geom = 0.0, pow_i = 1.0;
  for (int i = 0; i < k; ++i) {
    geom += pow_i;
    pow_i *= h;
  }
  res.bound = res.a_p * geom;
  res.std_error = std::sqrt((h + 1.0) * (h + 1.0) * mu0_se * mu0_se + phi0_se * phi0_se) * geom;
  return res;
}

double mean_convergence_bound(double hp, double p, int k,
                              std::span<const double> per_level_errors) {
  if (p < 1.0) throw std::domain_error("mean_convergence_bound: p must be >= 1");
  if (k < 0) throw std::domain_error("mean_convergence_bound: k must be >= 0");
  if (per_level_errors.size() != static_cast<std::size_t>(k) + 1)
    throw std::invalid_argument("mean_convergence_bound: need k+1 per-level errors");
  const double h = std::pow(hp, 1.0 / p);
  double geom = 0.0;
  for (int r = 0; r <= k; ++r) geom += std::pow(h, r);  // 0^0 == 1
  double weighted = 0.0;
  for (int j = 0; j <= k; ++j)
    weighted += std::pow(h, k - j) * per_level_errors[static_cast<std::size_t>(j)];
  return std::pow(geom, p - 1.0) * weighted;
}

double rate_exponent(double p, double q) {
  if (!(q > p) || !(p >= 1.0))
    throw std::domain_error("rate_exponent: need q > p >= 1");
  if (q == 2.0 * p)
    throw std::domain_error("rate_exponent: q = 2p is excluded");
  return std::min((q - p) / q, 0.5);
}

DiagnosticsReport run_convergence_experiment(const SfpeMap& map,
                                             const BranchingVectorSpec& spec,
                                             const ConvergenceExperimentConfig& cfg) {
  if (cfg.replications < 2)
    throw std::invalid_argument("run_convergence_experiment: replications must be >= 2");
  if (cfg.m_grid.empty())
    throw std::invalid_argument("run_convergence_experiment: empty m grid");
  if (!std::is_sorted(cfg.m_grid.begin(), cfg.m_grid.end()))
    throw std::invalid_argument("run_convergence_experiment: m grid must be increasing");

  DiagnosticsReport report;
  report.p = cfg.p;
  report.k = cfg.k;
  report.oracle_size = cfg.oracle_size;
  report.seed = cfg.seed;

  const std::size_t max_m = cfg.m_grid.back();
  if (cfg.oracle_size < 10 * max_m)
    report.notes.push_back(
        "oracle size M below 10*max(m); reference bias may be visible");

  // Constants.
  RandomStream const_rng(substream_seed(cfg.seed, StreamDomain::kDiagnostics, 0, 0));
  report.hp = estimate_Hp(map, spec, cfg.p, cfg.constant_trials, const_rng);
  report.rho_1 = rho_beta(spec, 1.0, cfg.constant_trials, const_rng);
  report.rho_p = rho_beta(spec, cfg.p, cfg.constant_trials, const_rng);
  report.moment =
      moment_bound(map, spec, cfg.p, cfg.k, cfg.init, cfg.constant_trials, const_rng);
  if (report.hp.value < 1.0) {
    report.c_p = report.hp.value;
    report.c_p_condition = map.linear_zero_mean ? "linear0 condition (i), c_p = H_p"
                                                : "H_p < 1, c_p = H_p";
  } else if (map.family == MapFamily::kLinear &&
             std::max(report.rho_1.value, report.rho_p.value) < 1.0) {
    report.c_p = std::max(report.rho_1.value, report.rho_p.value);
    report.c_p_condition = "linear condition (ii), c_p = rho_1 v rho_p";
  } else {
    report.c_p = report.hp.value;
    report.c_p_condition = "no certified contraction (c_p >= 1)";
  }

  // Oracle references for levels 0..k; one seed, so the per-level samples
  // are nested through shared subtrees.
  const std::uint64_t ref_seed = substream_seed(cfg.seed, StreamDomain::kDiagnostics, 1, 0);
  std::vector<EmpiricalDistribution> refs;
  refs.reserve(static_cast<std::size_t>(cfg.k) + 1);
  for (int j = 0; j <= cfg.k; ++j)
    refs.push_back(EmpiricalDistribution(sample_exact_iid(
        map, spec, j, cfg.init, cfg.oracle_size, ref_seed, cfg.budget, cfg.threads)));

  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<double> log_m, log_mean;
  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    const std::size_t m = cfg.m_grid[mi];
    PerMRow row;
    row.m = m;
    row.replications = cfg.replications;

    // Population-dynamics arm.
    std::vector<double> dists(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      const std::uint64_t run_seed =
          substream_seed(cfg.seed, StreamDomain::kDiagnostics, 16 + mi, r);
      PopDynOptions opts;
      opts.threads = cfg.threads;
      opts.keep_all_levels = false;
      const auto pools =
          run_population_dynamics(map, spec, cfg.k, m, cfg.init, run_seed, opts);
      dists[r] =
          wasserstein_p_pow(pool_to_empirical(pools.back()), refs.back(), cfg.p);
    }
    const auto main_stats = mean_and_se(dists);
    row.mean_dist_pow = main_stats.mean;
    row.std_error = main_stats.std_error;

    // I.i.d. arm: fresh size-m oracle samples per level, against the
    // same references.
    row.iid_errors.resize(static_cast<std::size_t>(cfg.k) + 1);
    row.iid_errors_se.resize(static_cast<std::size_t>(cfg.k) + 1);
    for (int j = 0; j <= cfg.k; ++j) {
      std::vector<double> errs(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        const std::uint64_t iid_seed = substream_seed(
            cfg.seed, StreamDomain::kDiagnostics, 64 + static_cast<std::uint64_t>(j),
            mi * reps + r);
        const auto draws = sample_exact_iid(map, spec, j, cfg.init, m, iid_seed,
                                            cfg.budget, cfg.threads);
        errs[r] = wasserstein_p_pow(EmpiricalDistribution(draws), refs[static_cast<std::size_t>(j)],
                                    cfg.p);
      }
      const auto st = mean_and_se(errs);
      row.iid_errors[static_cast<std::size_t>(j)] = st.mean;
      row.iid_errors_se[static_cast<std::size_t>(j)] = st.std_error;
    }

    row.bound = mean_convergence_bound(report.hp.value, cfg.p, cfg.k, row.iid_errors);
    const double h = std::pow(report.hp.value, 1.0 / cfg.p);
    double geom = 0.0;
    for (int r = 0; r <= cfg.k; ++r) geom += std::pow(h, r);
    double var = 0.0;
    for (int j = 0; j <= cfg.k; ++j) {
      const double coef = std::pow(h, cfg.k - j);
      const double se = row.iid_errors_se[static_cast<std::size_t>(j)];
      var += coef * coef * se * se;
    }
    row.bound_se = std::pow(geom, cfg.p - 1.0) * std::sqrt(var);
    row.dominance_ok =
        row.mean_dist_pow <=
        row.bound + cfg.se_multiplier *
                        std::sqrt(row.std_error * row.std_error + row.bound_se * row.bound_se);

    if (row.mean_dist_pow > 0.0) {
      log_m.push_back(std::log(static_cast<double>(m)));
      log_mean.push_back(std::log(row.mean_dist_pow));
    }
    report.per_m.push_back(std::move(row));
  }

  report.dominance_ok = true;
  for (const auto& row : report.per_m) report.dominance_ok &= row.dominance_ok;

  // Bound growth in the recursion depth at the largest m.
  const auto& deepest = report.per_m.back();
  for (int j = 0; j <= cfg.k; ++j)
    report.bound_values.emplace_back(
        j, mean_convergence_bound(
               report.hp.value, cfg.p, j,
               std::span<const double>(deepest.iid_errors.data(),
                                       static_cast<std::size_t>(j) + 1)));

  if (log_m.size() >= 2) {
    const auto fit = fit_line(log_m, log_mean);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.r_squared = fit.r_squared;
  } else {
    report.notes.push_back("log-log fit skipped: fewer than two positive means");
  }

  double exponent = 0.5;
  if (cfg.q) {
    exponent = rate_exponent(cfg.p, *cfg.q);
    report.theoretical_exponent = exponent;
  }
  report.slope_ok = report.slope <= -exponent + cfg.slope_slack;
  return report;
}

std::vector<ContractionRatio> contraction_check(const SfpeMap& map,
                                                const BranchingVectorSpec& spec, double p,
                                                int k, std::size_t M, std::uint64_t seed,
                                                const InitialDistribution& init,
                                                const OracleBudget& budget, int threads) {
  if (k < 2) throw std::invalid_argument("contraction_check: k must be >= 2");
  // One seed for every level: draw i shares its tree prefix across depths,
  // so successive empiricals are coupled and C == 0 collapses exactly.
  std::vector<EmpiricalDistribution> levels;
  levels.reserve(static_cast<std::size_t>(k) + 1);
  double scale = 0.0;
  for (int j = 0; j <= k; ++j) {
    auto draws = sample_exact_iid(map, spec, j, init, M, seed, budget, threads);
    for (double v : draws) scale = std::max(scale, std::fabs(v));
    levels.push_back(EmpiricalDistribution(std::move(draws)));
  }
  std::vector<double> dist(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j = 1; j <= k; ++j)
    dist[static_cast<std::size_t>(j)] =
        wasserstein_p(levels[static_cast<std::size_t>(j)],
                      levels[static_cast<std::size_t>(j) - 1], p);
  std::vector<ContractionRatio> out;
  const double floor = 10.0 * DBL_EPSILON * scale;
  for (int j = 2; j <= k; ++j) {
    ContractionRatio r;
    r.level = j;
    r.dist = dist[static_cast<std::size_t>(j)];
    const double denom = dist[static_cast<std::size_t>(j) - 1];
    if (denom > floor) {
      r.defined = true;
      r.ratio = r.dist / denom;
    } else {
      r.defined = false;
      r.ratio = 0.0;
    }
    out.push_back(r);
  }
  return out;
}

double FunctionalSpec::operator()(double x) const {
  switch (kind) {
    case Kind::kMoment:
      return std::pow(x, order);
    case Kind::kAbsMoment:
      return std::pow(std::fabs(x), order);
    case Kind::kIndicator:
      return x <= threshold ? 1.0 : 0.0;
    case Kind::kPolynomial: {
      double acc = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
  }
  return 0.0;
}

FunctionalEstimate estimate_functional(const SamplePool& pool, const FunctionalSpec& h,
                                       int bootstrap_reps, std::uint64_t seed) {
  const std::size_t m = pool.values.size();
  if (m < 1) throw std::invalid_argument("estimate_functional: empty pool");
  std::vector<double> hx(m);
  for (std::size_t i = 0; i < m; ++i) hx[i] = h(pool.values[i]);
  KahanSum s;
  for (double v : hx) s.add(v);
  FunctionalEstimate est;
  est.value = s.value() / static_cast<double>(m);

  if (bootstrap_reps > 1) {
    std::vector<double> means(static_cast<std::size_t>(bootstrap_reps));
    for (int b = 0; b < bootstrap_reps; ++b) {
      RandomStream rs(substream_seed(seed, StreamDomain::kBootstrap,
                                     static_cast<std::uint64_t>(b), 0));
      KahanSum bs;
      for (std::size_t i = 0; i < m; ++i) bs.add(hx[rs.uniform_index(m)]);
      means[static_cast<std::size_t>(b)] = bs.value() / static_cast<double>(m);
    }
    est.bootstrap_se = mean_and_se(means).sd;
  }
  return est;
}

std::vector<double> estimate_quantiles(const SamplePool& pool,
                                       std::span<const double> probs) {
  const auto ed = pool_to_empirical(pool);
  std::vector<double> out;
  out.reserve(probs.size());
  for (double u : probs) out.push_back(ed.quantile(u));
  return out;
}

}  // namespace sfpe
