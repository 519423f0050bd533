#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfpe/branching.hpp"
#include "sfpe/diagnostics.hpp"
#include "sfpe/laws.hpp"
#include "sfpe/maps.hpp"
#include "sfpe/wbp.hpp"

namespace sfpe {

// Flat sectioned key-value document:
//   [section]
//   key = value        # comment
// Keys are addressed as "section.key". Duplicate keys are an error.
struct ConfigDoc {
  std::vector<std::pair<std::string, std::string>> entries;

  std::optional<std::string> get(const std::string& key) const;
  bool has(const std::string& key) const;

  static ConfigDoc parse_string(const std::string& text);
  static ConfigDoc parse_file(const std::filesystem::path& path);
};

// Fully validated experiment description.
struct ExperimentConfig {
  SfpeMap map;
  BranchingVectorSpec spec;
  InitialDistribution init = InitialDistribution::point_mass(0.0);

  int k = 0;
  std::size_t m = 1;
  std::vector<std::size_t> m_grid;
  int replications = 20;
  std::size_t oracle_size = 100'000;
  double p = 1.0;
  std::optional<double> q;
  std::uint64_t seed = 0;
  bool seed_present = false;
  int threads = 1;
  OracleBudget budget;

  std::filesystem::path out_dir = "out";
  // Which artifacts cmd_simulate dumps: "pools" (all levels) or "final".
  std::string artifacts = "pools";

  // Throws ConfigError naming the offending key. `require_seed` is dropped
  // by the --entropy flag.
  static ExperimentConfig from_doc(const ConfigDoc& doc, bool require_seed = true);

  // Config echo for metadata sidecars; parseable by ConfigDoc.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

}  // namespace sfpe
