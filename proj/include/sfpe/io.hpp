#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfpe/diagnostics.hpp"
#include "sfpe/popdyn.hpp"

namespace sfpe {

// Shortest round-trip decimal form, locale-independent ('.' separator).
std::string format_double(double x);
// Fixed significant digits (reports, stdout).
std::string format_double(double x, int significant_digits);

// Pool CSV: header "level,index,value", one row per element in pool order.
void write_pool_csv(const std::filesystem::path& path, const SamplePool& pool);
void write_values_csv(const std::filesystem::path& path, int level,
                      std::span<const double> values);

// Reads a real-valued column: either a single-column file or the "value"
// column of a pool CSV. Skips one header line when present. Throws
// ConfigError on malformed numeric fields.
std::vector<double> read_values_csv(const std::filesystem::path& path);

// Key-value sidecar in the config-document grammar.
void write_metadata(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

// DiagnosticsReport: one CSV per section plus a text summary.
void write_report_csv(const std::filesystem::path& dir, const DiagnosticsReport& report);
void write_report_summary(const std::filesystem::path& path,
                          const DiagnosticsReport& report,
                          std::span<const ContractionRatio> ratios);

}  // namespace sfpe
