#include "sfpe/branching.hpp"

#include <cmath>
#include <sstream>

#include "sfpe/errors.hpp"
#include "sfpe/util.hpp"

namespace sfpe {

namespace {

// Offspring scale for the PageRankLike weights: a = cap * min(1, 2/lambda)
// gives E|C_1|^p = a^p/(p+1) <= cap^p/lambda for every p >= 1.
double pagerank_weight_scale(double cap, double lambda) {
  return cap * std::min(1.0, 2.0 / lambda);
}

std::uint64_t draw_offspring(const PrimitiveLaw& law, RandomStream& rng,
                             std::uint64_t cap) {
  const double raw = law.sample(rng);
  if (!(raw >= 0.0) || std::floor(raw) != raw)
    throw Error("offspring law produced a non-integer or negative value");
  if (raw > static_cast<double>(cap))
    throw BudgetError("offspring draw exceeds hard cap of " + std::to_string(cap),
                      static_cast<std::uint64_t>(raw));
  return static_cast<std::uint64_t>(raw);
}

double require_param(const std::map<std::string, std::string>& params,
                     const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("branching spec: missing parameter '" + key + "'");
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("branching spec: invalid number for '" + key + "'");
  }
}

std::optional<double> optional_param(const std::map<std::string, std::string>& params,
                                     const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return {};
  return require_param(params, key);
}

}  // namespace

const char* kind_name(BranchingVectorSpec::Kind k) {
  switch (k) {
    case BranchingVectorSpec::Kind::kQuicksort:
      return "quicksort";
    case BranchingVectorSpec::Kind::kFind:
      return "find";
    case BranchingVectorSpec::Kind::kIsing:
      return "ising";
    case BranchingVectorSpec::Kind::kPageRankLike:
      return "pagerank-like";
    case BranchingVectorSpec::Kind::kCustom:
      return "custom";
  }
  return "?";
}

BranchingVectorSpec BranchingVectorSpec::quicksort() {
  BranchingVectorSpec s;
  s.kind = Kind::kQuicksort;
  return s;
}

BranchingVectorSpec BranchingVectorSpec::find() {
  BranchingVectorSpec s;
  s.kind = Kind::kFind;
  return s;
}

BranchingVectorSpec BranchingVectorSpec::ising(double beta, PrimitiveLaw offspring,
                                               PrimitiveLaw field) {
  BranchingVectorSpec s;
  s.kind = Kind::kIsing;
  s.beta = beta;
  s.offspring = offspring;
  s.field = field;
  return s;
}

BranchingVectorSpec BranchingVectorSpec::pagerank_like(double cap, double mean_offspring,
                                                       double q_const) {
  BranchingVectorSpec s;
  s.kind = Kind::kPageRankLike;
  s.cap = cap;
  s.mean_offspring_param = mean_offspring;
  s.q_const = q_const;
  return s;
}

BranchingVectorSpec BranchingVectorSpec::custom(PrimitiveLaw n_law, PrimitiveLaw c_law,
                                                PrimitiveLaw q_law) {
  BranchingVectorSpec s;
  s.kind = Kind::kCustom;
  s.n_law = n_law;
  s.c_law = c_law;
  s.q_law = q_law;
  return s;
}

std::map<std::string, std::string> BranchingVectorSpec::to_params() const {
  std::map<std::string, std::string> p;
  auto put_real = [&](const std::string& key, double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << v;
    p[key] = os.str();
  };
  switch (kind) {
    case Kind::kQuicksort:
    case Kind::kFind:
      break;
    case Kind::kIsing:
      put_real("beta", beta);
      p["offspring"] = offspring.to_string();
      p["field"] = field.to_string();
      break;
    case Kind::kPageRankLike:
      put_real("cap", cap);
      put_real("mean_offspring", mean_offspring_param);
      put_real("q", q_const);
      break;
    case Kind::kCustom:
      p["n_law"] = n_law.to_string();
      p["c_law"] = c_law.to_string();
      p["q_law"] = q_law.to_string();
      break;
  }
  if (offspring_cap != 1'000'000) p["offspring_cap"] = std::to_string(offspring_cap);
  return p;
}

namespace {

void reject_unknown_params(const std::string& kind,
                           const std::map<std::string, std::string>& params,
                           std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : params) {
    bool known = key == "offspring_cap";
    for (const char* a : allowed) known |= key == a;
    if (!known)
      throw ConfigError("branching spec: unknown parameter '" + key + "' for kind '" +
                        kind + "'");
  }
}

}  // namespace

BranchingVectorSpec BranchingVectorSpec::from_params(
    const std::string& kind, const std::map<std::string, std::string>& params) {
  BranchingVectorSpec s;
  if (kind == "quicksort") {
    reject_unknown_params(kind, params, {});
    s = quicksort();
  } else if (kind == "find") {
    reject_unknown_params(kind, params, {});
    s = find();
  } else if (kind == "ising") {
    reject_unknown_params(kind, params, {"beta", "offspring", "field"});
    s = ising(require_param(params, "beta"));
    if (auto it = params.find("offspring"); it != params.end())
      s.offspring = PrimitiveLaw::parse(it->second);
    if (auto it = params.find("field"); it != params.end())
      s.field = PrimitiveLaw::parse(it->second);
  } else if (kind == "pagerank-like") {
    reject_unknown_params(kind, params, {"cap", "mean_offspring", "q"});
    const double cap = require_param(params, "cap");
    const double lambda = require_param(params, "mean_offspring");
    const double q0 = optional_param(params, "q").value_or(1.0);
    s = pagerank_like(cap, lambda, q0);
  } else if (kind == "custom") {
    reject_unknown_params(kind, params, {"n_law", "c_law", "q_law"});
    auto law_of = [&](const char* key) {
      auto it = params.find(key);
      if (it == params.end())
        throw ConfigError(std::string("branching spec: missing '") + key + "'");
      return PrimitiveLaw::parse(it->second);
    };
    s = custom(law_of("n_law"), law_of("c_law"), law_of("q_law"));
  } else {
    throw ConfigError("unknown branching kind '" + kind + "'");
  }
  if (auto cap = optional_param(params, "offspring_cap")) {
    if (*cap < 1) throw ConfigError("offspring_cap must be positive");
    s.offspring_cap = static_cast<std::uint64_t>(*cap);
  }
  return s;
}

std::string BranchingVectorSpec::label() const {
  std::string out = std::string("kind=") + kind_name(kind);
  for (const auto& [key, value] : to_params()) out += ";" + key + "=" + value;
  return out;
}

ValidationReport validate_spec(const BranchingVectorSpec& spec) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) {
    report.ok = false;
    report.errors.push_back(msg);
  };
  if (spec.offspring_cap < 1) fail("offspring_cap must be positive");
  switch (spec.kind) {
    case BranchingVectorSpec::Kind::kQuicksort:
    case BranchingVectorSpec::Kind::kFind:
      break;
    case BranchingVectorSpec::Kind::kIsing:
      if (!(spec.beta >= 0.0)) fail("beta must be >= 0");
      if (!spec.offspring.integer_valued())
        fail("ising offspring law must be a nonnegative-integer law");
      break;
    case BranchingVectorSpec::Kind::kPageRankLike:
      if (!(spec.cap > 0.0 && spec.cap < 1.0)) fail("cap must lie in (0,1)");
      if (!(spec.mean_offspring_param > 0.0)) fail("mean_offspring must be > 0");
      break;
    case BranchingVectorSpec::Kind::kCustom:
      if (!spec.n_law.integer_valued())
        fail("custom n_law must be a nonnegative-integer law");
      break;
  }
  return report;
}

void sample_branching_vector(const BranchingVectorSpec& spec, RandomStream& rng,
                             BranchingRealization& out) {
  out.c.clear();
  switch (spec.kind) {
    case BranchingVectorSpec::Kind::kQuicksort: {
      const double u = rng.u01();
      out.c.push_back(u);
      out.c.push_back(1.0 - u);
      out.q = 2.0 * u * std::log(u) + 2.0 * (1.0 - u) * std::log1p(-u) + 1.0;
      break;
    }
    case BranchingVectorSpec::Kind::kFind: {
      const double u = rng.u01();
      out.c.push_back(u);
      out.c.push_back(1.0 - u);
      out.q = 1.0;
      break;
    }
    case BranchingVectorSpec::Kind::kIsing: {
      const std::uint64_t n = draw_offspring(spec.offspring, rng, spec.offspring_cap);
      out.c.assign(n, std::tanh(spec.beta));
      out.q = spec.field.sample(rng);
      break;
    }
    case BranchingVectorSpec::Kind::kPageRankLike: {
      const std::uint64_t n = draw_offspring(
          PrimitiveLaw::poisson(spec.mean_offspring_param), rng, spec.offspring_cap);
      const double a = pagerank_weight_scale(spec.cap, spec.mean_offspring_param);
      out.c.resize(n);
      for (auto& w : out.c) w = a * (2.0 * rng.u01() - 1.0);
      out.q = spec.q_const;
      break;
    }
    case BranchingVectorSpec::Kind::kCustom: {
      const std::uint64_t n = draw_offspring(spec.n_law, rng, spec.offspring_cap);
      out.c.resize(n);
      for (auto& w : out.c) w = spec.c_law.sample(rng);
      out.q = spec.q_law.sample(rng);
      break;
    }
  }
}

BranchingRealization sample_branching_vector(const BranchingVectorSpec& spec,
                                             RandomStream& rng) {
  BranchingRealization real;
  sample_branching_vector(spec, rng, real);
  return real;
}

std::optional<double> exact_mean_offspring(const BranchingVectorSpec& spec) {
  switch (spec.kind) {
    case BranchingVectorSpec::Kind::kQuicksort:
    case BranchingVectorSpec::Kind::kFind:
      return 2.0;
    case BranchingVectorSpec::Kind::kIsing:
      return spec.offspring.mean();
    case BranchingVectorSpec::Kind::kPageRankLike:
      return spec.mean_offspring_param;
    case BranchingVectorSpec::Kind::kCustom:
      return spec.n_law.mean();
  }
  return {};
}

double mean_offspring(const BranchingVectorSpec& spec, std::size_t trials,
                      RandomStream& rng) {
  if (trials < 1) throw std::invalid_argument("mean_offspring: trials must be >= 1");
  // Deterministic offspring counts short-circuit to the constant.
  switch (spec.kind) {
    case BranchingVectorSpec::Kind::kQuicksort:
    case BranchingVectorSpec::Kind::kFind:
      return 2.0;
    case BranchingVectorSpec::Kind::kIsing:
      if (spec.offspring.kind == PrimitiveLaw::Kind::kConstant) return spec.offspring.a;
      break;
    case BranchingVectorSpec::Kind::kCustom:
      if (spec.n_law.kind == PrimitiveLaw::Kind::kConstant) return spec.n_law.a;
      break;
    default:
      break;
  }
  KahanSum total;
  BranchingRealization real;
  for (std::size_t t = 0; t < trials; ++t) {
    sample_branching_vector(spec, rng, real);
    total.add(static_cast<double>(real.n()));
  }
  return total.value() / static_cast<double>(trials);
}

}  // namespace sfpe
