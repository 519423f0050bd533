#pragma once

#include <filesystem>
#include <iosfwd>

#include "sfpe/config.hpp"

namespace sfpe {

// Exit codes: 0 success, 1 runtime failure (budget, overflow), 2 config or
// input parse failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_oracle(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_distance(const std::filesystem::path& file_a, const std::filesystem::path& file_b,
                 double p, std::ostream& out, std::ostream& err);
int cmd_experiment(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& config_path, bool entropy,
                 std::ostream& out, std::ostream& err);

// Full argv dispatch used by the binary.
int run_cli(int argc, const char* const* argv);

}  // namespace sfpe
