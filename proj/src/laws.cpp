#include "sfpe/laws.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "sfpe/errors.hpp"

namespace sfpe {

namespace {

// sign(x)*|x|^(p+1)/(p+1), the antiderivative of |x|^p.
double abs_pow_antideriv(double x, double p) {
  const double v = std::pow(std::fabs(x), p + 1.0) / (p + 1.0);
  return x < 0 ? -v : v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

double parse_real(const std::string& text, std::string_view what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + text + "' in " + std::string(what));
  }
}

}  // namespace

double PrimitiveLaw::sample(RandomStream& rng) const {
  switch (kind) {
    case Kind::kConstant:
      return a;
    case Kind::kUniform:
      return a + (b - a) * rng.u01();
    case Kind::kBernoulli:
      return rng.u01() < a ? 1.0 : 0.0;
    case Kind::kPoisson: {
      if (a <= 0.0) return 0.0;
      std::poisson_distribution<long long> law(a);
      return static_cast<double>(law(rng));
    }
    case Kind::kGeometric: {
      // failures before the first success, success probability a
      if (a >= 1.0) return 0.0;
      return std::floor(std::log(rng.u01()) / std::log1p(-a));
    }
    case Kind::kFnOfUniform: {
      const double u = rng.u01();
      const double f = fn == Fn::kNegLog ? -std::log(u) : u;
      return a + b * f;
    }
  }
  return 0.0;
}

bool PrimitiveLaw::integer_valued() const {
  switch (kind) {
    case Kind::kConstant:
      return a >= 0.0 && std::floor(a) == a;
    case Kind::kBernoulli:
    case Kind::kPoisson:
    case Kind::kGeometric:
      return true;
    default:
      return false;
  }
}

std::optional<double> PrimitiveLaw::mean() const {
  switch (kind) {
    case Kind::kConstant:
      return a;
    case Kind::kUniform:
      return 0.5 * (a + b);
    case Kind::kBernoulli:
    case Kind::kPoisson:
      return a;
    case Kind::kGeometric:
      return a > 0.0 ? (1.0 - a) / a : std::optional<double>{};
    case Kind::kFnOfUniform:
      return fn == Fn::kNegLog ? a + b : a + 0.5 * b;
  }
  return {};
}

std::optional<double> PrimitiveLaw::abs_moment(double p) const {
  switch (kind) {
    case Kind::kConstant:
      return std::pow(std::fabs(a), p);
    case Kind::kUniform: {
      if (a == b) return std::pow(std::fabs(a), p);
      return (abs_pow_antideriv(b, p) - abs_pow_antideriv(a, p)) / (b - a);
    }
    case Kind::kBernoulli:
      return a;  // |1|^p with probability a
    default:
      return {};
  }
}

std::string PrimitiveLaw::to_string() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  switch (kind) {
    case Kind::kConstant:
      os << "constant:" << a;
      break;
    case Kind::kUniform:
      os << "uniform:" << a << "," << b;
      break;
    case Kind::kBernoulli:
      os << "bernoulli:" << a;
      break;
    case Kind::kPoisson:
      os << "poisson:" << a;
      break;
    case Kind::kGeometric:
      os << "geometric:" << a;
      break;
    case Kind::kFnOfUniform:
      os << "fnofu:" << (fn == Fn::kNegLog ? "neglog" : "identity") << "," << a << ","
         << b;
      break;
  }
  return os.str();
}

PrimitiveLaw PrimitiveLaw::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  const std::string args(colon == std::string_view::npos ? "" : text.substr(colon + 1));
  const auto parts = split(args, ',');
  auto arity = [&](std::size_t want) {
    if (parts.size() != want || (want > 0 && args.empty()))
      throw ConfigError("law '" + std::string(text) + "': expected " +
                        std::to_string(want) + " parameter(s)");
  };
  if (name == "constant") {
    arity(1);
    return constant(parse_real(parts[0], text));
  }
  if (name == "uniform") {
    arity(2);
    const double lo = parse_real(parts[0], text);
    const double hi = parse_real(parts[1], text);
    if (lo > hi) throw ConfigError("law '" + std::string(text) + "': lower bound above upper");
    return uniform(lo, hi);
  }
  if (name == "bernoulli") {
    arity(1);
    const double pr = parse_real(parts[0], text);
    if (pr < 0.0 || pr > 1.0)
      throw ConfigError("law '" + std::string(text) + "': probability outside [0,1]");
    return bernoulli(pr);
  }
  if (name == "poisson") {
    arity(1);
    const double lambda = parse_real(parts[0], text);
    if (lambda < 0.0) throw ConfigError("law '" + std::string(text) + "': rate must be >= 0");
    return poisson(lambda);
  }
  if (name == "geometric") {
    arity(1);
    const double pr = parse_real(parts[0], text);
    if (pr <= 0.0 || pr > 1.0)
      throw ConfigError("law '" + std::string(text) + "': success probability outside (0,1]");
    return geometric(pr);
  }
  if (name == "fnofu") {
    arity(3);
    Fn f;
    if (parts[0] == "identity")
      f = Fn::kIdentity;
    else if (parts[0] == "neglog")
      f = Fn::kNegLog;
    else
      throw ConfigError("law '" + std::string(text) + "': unknown transform '" + parts[0] + "'");
    return fn_of_uniform(f, parse_real(parts[1], text), parse_real(parts[2], text));
  }
  throw ConfigError("unknown law kind '" + name + "'");
}

double InitialDistribution::draw(RandomStream& rng) const {
  switch (kind) {
    case Kind::kPointMass:
      return a;
    case Kind::kUniform:
      return a + (b - a) * rng.u01();
    case Kind::kLaw:
      return law.sample(rng);
  }
  return 0.0;
}

std::optional<double> InitialDistribution::abs_moment(double p) const {
  switch (kind) {
    case Kind::kPointMass:
      return std::pow(std::fabs(a), p);
    case Kind::kUniform: {
      if (a == b) return std::pow(std::fabs(a), p);
      return (abs_pow_antideriv(b, p) - abs_pow_antideriv(a, p)) / (b - a);
    }
    case Kind::kLaw:
      return law.abs_moment(p);
  }
  return {};
}

std::string InitialDistribution::to_string() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  switch (kind) {
    case Kind::kPointMass:
      os << "point:" << a;
      break;
    case Kind::kUniform:
      os << "uniform:" << a << "," << b;
      break;
    case Kind::kLaw:
      os << "law:" << law.to_string();
      break;
  }
  return os.str();
}

InitialDistribution InitialDistribution::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  if (name == "point") {
    if (colon == std::string_view::npos)
      throw ConfigError("init 'point' requires a value, e.g. point:0");
    return point_mass(parse_real(std::string(text.substr(colon + 1)), text));
  }
  if (name == "uniform") {
    const auto parts = split(text.substr(colon + 1), ',');
    if (parts.size() != 2) throw ConfigError("init 'uniform' requires two bounds");
    const double lo = parse_real(parts[0], text);
    const double hi = parse_real(parts[1], text);
    if (lo > hi) throw ConfigError("init 'uniform': lower bound above upper");
    return uniform(lo, hi);
  }
  if (name == "law") {
    if (colon == std::string_view::npos) throw ConfigError("init 'law' requires a law");
    return from_law(PrimitiveLaw::parse(text.substr(colon + 1)));
  }
  throw ConfigError("unknown init kind '" + name + "'");
}

}  // namespace sfpe
