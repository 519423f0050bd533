#include "sfpe/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sfpe/errors.hpp"

namespace sfpe {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_real(const std::string& text, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': invalid number '" + text + "'");
  }
}

long long to_int(const std::string& text, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': invalid integer '" + text + "'");
  }
}

std::uint64_t to_u64(const std::string& text, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': invalid unsigned integer '" + text + "'");
  }
}

bool to_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': invalid boolean '" + text + "'");
}

std::vector<std::size_t> to_size_list(const std::string& text, const std::string& key) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("key '" + key + "': empty list element");
    const long long v = to_int(item, key);
    if (v < 1) throw ConfigError("key '" + key + "': entries must be >= 1");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

}  // namespace

std::optional<std::string> ConfigDoc::get(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  return {};
}

bool ConfigDoc::has(const std::string& key) const { return get(key).has_value(); }

ConfigDoc ConfigDoc::parse_string(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (doc.has(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                        "'");
    doc.entries.emplace_back(key, value);
  }
  return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

ExperimentConfig ExperimentConfig::from_doc(const ConfigDoc& doc, bool require_seed) {
  ExperimentConfig cfg;

  // [map]
  const auto family_text = doc.get("map.family").value_or("linear");
  const auto family = parse_family(family_text);
  if (!family) throw ConfigError("key 'map.family': unknown family '" + family_text + "'");
  cfg.map.family = *family;
  if (auto beta = doc.get("map.beta")) {
    if (cfg.map.family != MapFamily::kFreeEntropy)
      throw ConfigError("key 'map.beta': only valid for the free-entropy family");
    cfg.map.beta = to_real(*beta, "map.beta");
    if (!(cfg.map.beta >= 0.0)) throw ConfigError("key 'map.beta': must be >= 0");
  } else if (cfg.map.family == MapFamily::kFreeEntropy) {
    throw ConfigError("key 'map.beta': required for the free-entropy family");
  }
  if (auto zm = doc.get("map.linear_zero_mean")) {
    if (cfg.map.family != MapFamily::kLinear)
      throw ConfigError("key 'map.linear_zero_mean': only valid for the linear family");
    cfg.map.linear_zero_mean = to_bool(*zm, "map.linear_zero_mean");
  }

  // [branching]
  const auto kind = doc.get("branching.kind");
  if (!kind) throw ConfigError("key 'branching.kind': required");
  std::map<std::string, std::string> params;
  for (const auto& [k, v] : doc.entries) {
    if (k.rfind("branching.", 0) == 0 && k != "branching.kind")
      params[k.substr(std::string("branching.").size())] = v;
  }
  try {
    cfg.spec = BranchingVectorSpec::from_params(*kind, params);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("section [branching]: ") + e.what());
  }
  const auto report = validate_spec(cfg.spec);
  if (!report.ok) {
    std::string msg = "section [branching]: invalid spec";
    for (const auto& err : report.errors) msg += ": " + err + " (key 'branching.beta' and friends)";
    throw ConfigError(msg);
  }
  // The free-entropy map requires C_i == tanh(beta), which only the ising
  // spec guarantees; the betas must agree.
  if (cfg.map.family == MapFamily::kFreeEntropy) {
    if (cfg.spec.kind != BranchingVectorSpec::Kind::kIsing)
      throw ConfigError(
          "key 'branching.kind': the free-entropy map requires an ising branching spec");
    if (cfg.spec.beta != cfg.map.beta)
      throw ConfigError("key 'branching.beta': must equal map.beta for free-entropy runs");
  }

  // [run]
  if (auto k = doc.get("run.k")) {
    const long long v = to_int(*k, "run.k");
    if (v < 0) throw ConfigError("key 'run.k': must be >= 0");
    cfg.k = static_cast<int>(v);
  }
  if (auto m = doc.get("run.m")) {
    const long long v = to_int(*m, "run.m");
    if (v < 1) throw ConfigError("key 'run.m': must be >= 1");
    cfg.m = static_cast<std::size_t>(v);
  }
  if (auto grid = doc.get("run.m_grid")) cfg.m_grid = to_size_list(*grid, "run.m_grid");
  if (auto reps = doc.get("run.replications")) {
    const long long v = to_int(*reps, "run.replications");
    if (v < 2) throw ConfigError("key 'run.replications': must be >= 2");
    cfg.replications = static_cast<int>(v);
  }
  if (auto M = doc.get("run.oracle_m")) {
    const long long v = to_int(*M, "run.oracle_m");
    if (v < 1) throw ConfigError("key 'run.oracle_m': must be >= 1");
    cfg.oracle_size = static_cast<std::size_t>(v);
  }
  if (auto p = doc.get("run.p")) {
    cfg.p = to_real(*p, "run.p");
    if (!(cfg.p >= 1.0)) throw ConfigError("key 'run.p': must be >= 1");
  }
  if (auto q = doc.get("run.q")) {
    const double v = to_real(*q, "run.q");
    if (!(v > cfg.p)) throw ConfigError("key 'run.q': must exceed run.p");
    if (v == 2.0 * cfg.p)
      throw ConfigError("key 'run.q': the rate bound requires q > p with q != 2p");
    cfg.q = v;
  }
  if (auto seed = doc.get("run.seed")) {
    cfg.seed = to_u64(*seed, "run.seed");
    cfg.seed_present = true;
  } else if (require_seed) {
    throw ConfigError(
        "key 'run.seed': required (pass --entropy to draw one from the system)");
  }
  if (auto init = doc.get("run.init")) {
    try {
      cfg.init = InitialDistribution::parse(*init);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("key 'run.init': ") + e.what());
    }
  }
  if (auto threads = doc.get("run.threads")) {
    const long long v = to_int(*threads, "run.threads");
    if (v < 1) throw ConfigError("key 'run.threads': must be >= 1");
    cfg.threads = static_cast<int>(v);
  }
  if (auto b = doc.get("run.max_nodes")) cfg.budget.max_nodes = to_u64(*b, "run.max_nodes");
  if (auto b = doc.get("run.max_total_nodes"))
    cfg.budget.max_total_nodes = to_u64(*b, "run.max_total_nodes");

  // [output]
  if (auto dir = doc.get("output.dir")) cfg.out_dir = *dir;
  if (auto artifacts = doc.get("output.artifacts")) {
    if (*artifacts != "pools" && *artifacts != "final")
      throw ConfigError("key 'output.artifacts': expected 'pools' or 'final'");
    cfg.artifacts = *artifacts;
  }

  if (cfg.m_grid.empty()) cfg.m_grid.push_back(cfg.m);
  return cfg;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("map.family", family_name(map.family));
  if (map.family == MapFamily::kFreeEntropy) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << map.beta;
    kv.emplace_back("map.beta", os.str());
  }
  if (map.linear_zero_mean) kv.emplace_back("map.linear_zero_mean", "true");
  kv.emplace_back("branching.kind", kind_name(spec.kind));
  for (const auto& [k, v] : spec.to_params()) kv.emplace_back("branching." + k, v);
  auto put_num = [&](const std::string& key, auto v) {
    kv.emplace_back(key, std::to_string(v));
  };
  put_num("run.k", k);
  put_num("run.m", m);
  {
    std::string grid;
    for (std::size_t i = 0; i < m_grid.size(); ++i)
      grid += (i ? "," : "") + std::to_string(m_grid[i]);
    kv.emplace_back("run.m_grid", grid);
  }
  put_num("run.replications", replications);
  put_num("run.oracle_m", oracle_size);
  {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << p;
    kv.emplace_back("run.p", os.str());
    if (q) {
      std::ostringstream qs;
      qs.imbue(std::locale::classic());
      qs << *q;
      kv.emplace_back("run.q", qs.str());
    }
  }
  put_num("run.seed", seed);
  kv.emplace_back("run.init", init.to_string());
  put_num("run.threads", threads);
  kv.emplace_back("output.artifacts", artifacts);
  return kv;
}

}  // namespace sfpe
