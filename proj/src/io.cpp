#include "sfpe/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sfpe/errors.hpp"
#include "sfpe/version.hpp"

namespace sfpe {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

double parse_field(const std::string& field, const std::filesystem::path& path, int lineno) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ConfigError("file '" + path.string() + "' line " + std::to_string(lineno) +
                      ": malformed number '" + field + "'");
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string format_double(double x, int significant_digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, x);
  return buf;
}

void write_values_csv(const std::filesystem::path& path, int level,
                      std::span<const double> values) {
  auto out = open_out(path);
  out << "level,index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    out << level << ',' << i << ',' << format_double(values[i]) << '\n';
}

void write_pool_csv(const std::filesystem::path& path, const SamplePool& pool) {
  write_values_csv(path, pool.level, pool.values);
}

std::vector<double> read_values_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // Take the last comma-separated field; pool CSVs carry the value there.
    const auto comma = line.rfind(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    if (first) {
      first = false;
      if (field == "value") continue;  // header
    }
    out.push_back(parse_field(field, path, lineno));
  }
  if (out.empty())
    throw ConfigError("file '" + path.string() + "': no numeric rows");
  return out;
}

void write_metadata(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = open_out(path);
  out << "# generated by sfpe " << kVersion << "\n";
  out << "schema_version = 1\n";
  std::string section;
  for (const auto& [key, value] : entries) {
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      const std::string sec = key.substr(0, dot);
      if (sec != section) {
        section = sec;
        out << "[" << section << "]\n";
      }
      out << key.substr(dot + 1) << " = " << value << "\n";
    } else {
      out << key << " = " << value << "\n";
    }
  }
}

void write_report_csv(const std::filesystem::path& dir, const DiagnosticsReport& report) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "constants.csv");
    out << "name,value,std_error,source\n";
    out << "p," << format_double(report.p) << ",0,config\n";
    out << "H_p," << format_double(report.hp.value) << ','
        << format_double(report.hp.std_error) << ','
        << (report.hp.closed_form ? "closed-form" : "generic-mc") << "\n";
    out << "H_p_generic," << format_double(report.hp.generic_value) << ','
        << format_double(report.hp.generic_std_error) << ",generic-mc\n";
    out << "rho_1," << format_double(report.rho_1.value) << ','
        << format_double(report.rho_1.std_error) << ','
        << (report.rho_1.analytic ? "analytic" : "mc") << "\n";
    out << "rho_p," << format_double(report.rho_p.value) << ','
        << format_double(report.rho_p.std_error) << ','
        << (report.rho_p.analytic ? "analytic" : "mc") << "\n";
    out << "A_p," << format_double(report.moment.a_p) << ','
        << format_double(report.moment.std_error) << ",mc\n";
    out << "c_p," << format_double(report.c_p) << ",0," << report.c_p_condition << "\n";
  }
  {
    auto out = open_out(dir / "per_m.csv");
    out << "m,replications,mean_dp_pow,std_error,bound,bound_se,dominance_ok\n";
    for (const auto& row : report.per_m)
      out << row.m << ',' << row.replications << ',' << format_double(row.mean_dist_pow)
          << ',' << format_double(row.std_error) << ',' << format_double(row.bound) << ','
          << format_double(row.bound_se) << ',' << (row.dominance_ok ? 1 : 0) << '\n';
  }
  {
    auto out = open_out(dir / "iid_arm.csv");
    out << "m,level,mean_dp_pow,std_error\n";
    for (const auto& row : report.per_m)
      for (std::size_t j = 0; j < row.iid_errors.size(); ++j)
        out << row.m << ',' << j << ',' << format_double(row.iid_errors[j]) << ','
            << format_double(row.iid_errors_se[j]) << '\n';
  }
  {
    auto out = open_out(dir / "bounds.csv");
    out << "k,bound\n";
    for (const auto& [depth, bound] : report.bound_values)
      out << depth << ',' << format_double(bound) << '\n';
  }
  {
    auto out = open_out(dir / "rate.csv");
    out << "slope,intercept,r_squared,theoretical_exponent,slope_ok\n";
    out << format_double(report.slope) << ',' << format_double(report.intercept) << ','
        << format_double(report.r_squared) << ','
        << (report.theoretical_exponent ? format_double(*report.theoretical_exponent)
                                        : std::string("0.5"))
        << ',' << (report.slope_ok ? 1 : 0) << '\n';
  }
}

void write_report_summary(const std::filesystem::path& path,
                          const DiagnosticsReport& report,
                          std::span<const ContractionRatio> ratios) {
  auto out = open_out(path);
  out << "convergence experiment summary (sfpe " << kVersion << ")\n";
  out << "p = " << format_double(report.p, 12) << ", k = " << report.k
      << ", oracle M = " << report.oracle_size << ", seed = " << report.seed << "\n\n";

  out << "constants\n";
  out << "  H_" << format_double(report.p, 6) << " = " << format_double(report.hp.value, 12)
      << (report.hp.closed_form ? " (closed form)" : " (generic MC)") << "\n";
  out << "  H_p generic MC = " << format_double(report.hp.generic_value, 12) << " +- "
      << format_double(report.hp.generic_std_error, 6) << "\n";
  out << "  rho_1 = " << format_double(report.rho_1.value, 12)
      << ", rho_p = " << format_double(report.rho_p.value, 12) << "\n";
  out << "  A_p = " << format_double(report.moment.a_p, 12)
      << ", moment bound (k) = " << format_double(report.moment.bound, 12) << "\n";
  out << "  c_p = " << format_double(report.c_p, 12) << " [" << report.c_p_condition
      << "]\n\n";

  out << "per-m distances (mean d_p^p against the oracle reference)\n";
  for (const auto& row : report.per_m) {
    out << "  m = " << row.m << ": " << format_double(row.mean_dist_pow, 8) << " +- "
        << format_double(row.std_error, 6) << " | bound " << format_double(row.bound, 8)
        << " +- " << format_double(row.bound_se, 6) << " | dominance "
        << (row.dominance_ok ? "PASS" : "FAIL") << "\n";
  }
  out << "\nrate: slope = " << format_double(report.slope, 8)
      << " (R^2 = " << format_double(report.r_squared, 6) << "), needs <= "
      << format_double(-(report.theoretical_exponent ? *report.theoretical_exponent : 0.5),
                       6)
      << " + slack: " << (report.slope_ok ? "PASS" : "FAIL") << "\n";
  out << "dominance overall: " << (report.dominance_ok ? "PASS" : "FAIL") << "\n";

  if (!ratios.empty()) {
    out << "\ncontraction ratios d_p(F_j,F_{j-1}) / d_p(F_{j-1},F_{j-2})\n";
    for (const auto& r : ratios) {
      out << "  j = " << r.level << ": ";
      if (r.defined)
        out << format_double(r.ratio, 8) << " (d = " << format_double(r.dist, 6) << ")\n";
      else
        out << "undefined (degenerate denominator)\n";
    }
  }
  for (const auto& note : report.notes) out << "note: " << note << "\n";
}

}  // namespace sfpe
