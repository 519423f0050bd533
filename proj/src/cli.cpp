#include "sfpe/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "sfpe/diagnostics.hpp"
#include "sfpe/errors.hpp"
#include "sfpe/io.hpp"
#include "sfpe/popdyn.hpp"
#include "sfpe/version.hpp"
#include "sfpe/wbp.hpp"

namespace sfpe {

namespace {

std::string level_file_name(int level) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pool_level_%02d.csv", level);
  return buf;
}

void write_run_metadata(const std::filesystem::path& path, const ExperimentConfig& cfg,
                        const std::string& command,
                        const std::vector<std::pair<std::string, std::string>>& extra) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("command", command);
  for (const auto& e : extra) kv.push_back(e);
  for (const auto& e : cfg.echo()) kv.push_back(e);
  write_metadata(path, kv);
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    PopDynOptions opts;
    opts.threads = cfg.threads;
    opts.keep_all_levels = cfg.artifacts == "pools";
    const auto pools = run_population_dynamics(cfg.map, cfg.spec, cfg.k, cfg.m, cfg.init,
                                               cfg.seed, opts);
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& pool : pools)
      write_pool_csv(cfg.out_dir / level_file_name(pool.level), pool);
    write_run_metadata(cfg.out_dir / "metadata.meta", cfg, "simulate",
                       {{"source", "popdyn"}});
    out << "wrote " << pools.size() << " pool file(s) to " << cfg.out_dir.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "simulate: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_oracle(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    // Preflight: refuse clearly infeasible depths before drawing anything.
    // The mean-based power sum is free; tree simulation is the fallback.
    double per_draw = 0.0;
    if (const auto mean_n = exact_mean_offspring(cfg.spec)) {
      double pw = 1.0;
      for (int j = 0; j <= cfg.k && per_draw < 1e18; ++j) {
        per_draw += pw;
        pw *= *mean_n;
      }
    } else {
      RandomStream rng(substream_seed(cfg.seed, StreamDomain::kOracle, 99, 0));
      per_draw = node_count_estimate(cfg.spec, cfg.k, 64, rng, cfg.budget).value;
    }
    if (per_draw > static_cast<double>(cfg.budget.max_nodes) ||
        per_draw * static_cast<double>(cfg.m) >
            static_cast<double>(cfg.budget.max_total_nodes)) {
      err << "oracle: estimated nodes per draw " << format_double(per_draw, 6) << " x "
          << cfg.m << " draws exceeds the node budget (per-draw "
          << cfg.budget.max_nodes << ", total " << cfg.budget.max_total_nodes
          << "); lower k or m\n";
      return kExitRuntime;
    }
    std::uint64_t total_nodes = 0;
    const auto values = sample_exact_iid(cfg.map, cfg.spec, cfg.k, cfg.init, cfg.m,
                                         cfg.seed, cfg.budget, cfg.threads, &total_nodes);
    std::filesystem::create_directories(cfg.out_dir);
    write_values_csv(cfg.out_dir / "oracle.csv", cfg.k, values);
    write_run_metadata(cfg.out_dir / "metadata.meta", cfg, "oracle",
                       {{"source", "oracle"},
                        {"total_nodes", std::to_string(total_nodes)},
                        {"estimated_nodes_per_draw", format_double(per_draw)}});
    out << "wrote " << values.size() << " oracle draw(s), " << total_nodes
        << " tree nodes\n";
    return kExitOk;
  } catch (const BudgetError& e) {
    err << "oracle: " << e.what() << " (nodes seen: " << e.nodes_seen << ")\n";
    return kExitRuntime;
  } catch (const Error& e) {
    err << "oracle: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_distance(const std::filesystem::path& file_a, const std::filesystem::path& file_b,
                 double p, std::ostream& out, std::ostream& err) {
  try {
    const EmpiricalDistribution a(read_values_csv(file_a));
    const EmpiricalDistribution b(read_values_csv(file_b));
    out << format_double(wasserstein_p(a, b, p), 12) << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "distance: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "distance: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_experiment(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    ConvergenceExperimentConfig xcfg;
    xcfg.p = cfg.p;
    xcfg.k = cfg.k;
    xcfg.m_grid = cfg.m_grid;
    xcfg.replications = cfg.replications;
    xcfg.oracle_size = cfg.oracle_size;
    xcfg.seed = cfg.seed;
    xcfg.init = cfg.init;
    xcfg.q = cfg.q;
    xcfg.threads = cfg.threads;
    xcfg.budget = cfg.budget;
    const auto report = run_convergence_experiment(cfg.map, cfg.spec, xcfg);

    std::vector<ContractionRatio> ratios;
    if (cfg.k >= 2)
      ratios = contraction_check(cfg.map, cfg.spec, cfg.p, cfg.k, cfg.oracle_size,
                                 substream_seed(cfg.seed, StreamDomain::kDiagnostics, 2, 0),
                                 cfg.init, cfg.budget, cfg.threads);

    std::filesystem::create_directories(cfg.out_dir);
    write_report_csv(cfg.out_dir, report);
    if (!ratios.empty()) {
      std::ofstream file(cfg.out_dir / "contraction.csv", std::ios::binary);
      file << "level,ratio,defined,distance\n";
      for (const auto& r : ratios)
        file << r.level << ',' << format_double(r.ratio) << ',' << (r.defined ? 1 : 0)
             << ',' << format_double(r.dist) << '\n';
    }
    write_report_summary(cfg.out_dir / "summary.txt", report, ratios);
    write_run_metadata(cfg.out_dir / "metadata.meta", cfg, "experiment", {});
    out << "report written to " << cfg.out_dir.string() << " (dominance "
        << (report.dominance_ok ? "PASS" : "FAIL") << ", slope "
        << (report.slope_ok ? "PASS" : "FAIL") << ")\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "experiment: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_validate(const std::filesystem::path& config_path, bool entropy, std::ostream& out,
                 std::ostream& err) {
  try {
    const auto doc = ConfigDoc::parse_file(config_path);
    const auto cfg = ExperimentConfig::from_doc(doc, /*require_seed=*/!entropy);
    const auto report = validate_spec(cfg.spec);
    if (!report.ok) {
      for (const auto& e : report.errors) err << "validate: " << e << "\n";
      return kExitConfig;
    }
    out << "config ok: map " << cfg.map.label() << "; spec " << cfg.spec.label() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "validate: " << e.what() << "\n";
    return kExitConfig;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"population-dynamics simulation toolkit for stochastic fixed-point equations"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool entropy = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "experiment config file");
    if (needs_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
    cmd->add_option("--threads", threads, "worker thread cap (overrides run.threads)");
    cmd->add_flag("--entropy", entropy,
                  "allow a missing run.seed; draws one from the system");
  };

  auto* simulate = app.add_subcommand("simulate", "run population dynamics, dump pools");
  add_common(simulate, true);
  auto* oracle = app.add_subcommand("oracle", "exact weighted-branching-process draws");
  add_common(oracle, true);
  auto* experiment = app.add_subcommand("experiment", "convergence diagnostics report");
  add_common(experiment, true);
  auto* validate = app.add_subcommand("validate", "parse and validate a config");
  add_common(validate, true);

  auto* distance = app.add_subcommand("distance", "Wasserstein distance of two value CSVs");
  std::string file_a, file_b;
  double p = 1.0;
  distance->add_option("file_a", file_a, "first single-column CSV")->required();
  distance->add_option("file_b", file_b, "second single-column CSV")->required();
  distance->add_option("-p,--order", p, "Wasserstein order (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (distance->parsed()) {
    if (!(p >= 1.0)) {
      std::cerr << "distance: order must be >= 1\n";
      return kExitConfig;
    }
    return cmd_distance(file_a, file_b, p, std::cout, std::cerr);
  }

  if (validate->parsed()) return cmd_validate(config_path, entropy, std::cout, std::cerr);

  ExperimentConfig cfg;
  try {
    const auto doc = ConfigDoc::parse_file(config_path);
    cfg = ExperimentConfig::from_doc(doc, /*require_seed=*/!entropy);
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!cfg.seed_present) {
    std::random_device rd;
    cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    cfg.seed_present = true;
    std::cerr << "entropy seed: " << cfg.seed << "\n";
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (threads > 0) cfg.threads = threads;

  if (simulate->parsed()) return cmd_simulate(cfg, std::cout, std::cerr);
  if (oracle->parsed()) return cmd_oracle(cfg, std::cout, std::cerr);
  if (experiment->parsed()) return cmd_experiment(cfg, std::cout, std::cerr);
  return kExitConfig;
}

}  // namespace sfpe
