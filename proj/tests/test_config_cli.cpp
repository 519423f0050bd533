#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sfpe/cli.hpp"
#include "sfpe/config.hpp"
#include "sfpe/errors.hpp"
#include "sfpe/io.hpp"

using namespace sfpe;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sfpe_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

constexpr const char* kQuicksortConfig = R"(
# quicksort preset
[map]
family = linear
linear_zero_mean = true

[branching]
kind = quicksort

[run]
k = 3
m = 50
p = 1
seed = 7

[output]
dir = unused
)";

}  // namespace

TEST_CASE("config document parsing") {
  const auto doc = ConfigDoc::parse_string("[a]\nx = 1 # comment\ny=2\n\n[b]\nx = 3\n");
  CHECK(*doc.get("a.x") == "1");
  CHECK(*doc.get("a.y") == "2");
  CHECK(*doc.get("b.x") == "3");
  CHECK_FALSE(doc.get("c.x").has_value());
  CHECK_THROWS_AS(ConfigDoc::parse_string("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::parse_string("madness\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::parse_string("[open\n"), ConfigError);
}

TEST_CASE("experiment config extraction and validation") {
  const auto cfg =
      ExperimentConfig::from_doc(ConfigDoc::parse_string(kQuicksortConfig));
  CHECK(cfg.map.family == MapFamily::kLinear);
  CHECK(cfg.map.linear_zero_mean);
  CHECK(cfg.spec.kind == BranchingVectorSpec::Kind::kQuicksort);
  CHECK(cfg.k == 3);
  CHECK(cfg.m == 50);
  CHECK(cfg.seed == 7);
  CHECK(cfg.out_dir == "unused");

  // invalid beta names the offending key
  try {
    ExperimentConfig::from_doc(ConfigDoc::parse_string(
        "[map]\nfamily = free-entropy\nbeta = 0.5\n[branching]\nkind = ising\nbeta = "
        "-1\n[run]\nseed = 1\n"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }

  // missing seed is an error unless entropy is allowed
  const auto no_seed = ConfigDoc::parse_string("[branching]\nkind = find\n");
  CHECK_THROWS_AS(ExperimentConfig::from_doc(no_seed), ConfigError);
  CHECK_NOTHROW(ExperimentConfig::from_doc(no_seed, /*require_seed=*/false));

  // free-entropy requires a matching ising spec
  CHECK_THROWS_AS(ExperimentConfig::from_doc(ConfigDoc::parse_string(
                      "[map]\nfamily = free-entropy\nbeta = 0.5\n[branching]\nkind = "
                      "find\n[run]\nseed = 1\n")),
                  ConfigError);
}

TEST_CASE("format_double round-trips and stays locale-free") {
  for (double v : {0.0, 1.0, -1.5, 1.0 / 3.0, 1e-17, 123456789.123456789}) {
    const std::string s = format_double(v);
    CHECK(s.find(',') == std::string::npos);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(2.0, 12) == "2");
}

TEST_CASE("values CSV round-trip and error paths") {
  const auto dir = temp_dir("csv");
  const std::vector<double> values{1.5, -2.25, 0.0, 1e-9};
  write_values_csv(dir / "values.csv", 3, values);
  const auto back = read_values_csv(dir / "values.csv");
  REQUIRE(back.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) CHECK(back[i] == values[i]);

  write_file(dir / "single.csv", "1.5\n2.5\n");
  const auto singles = read_values_csv(dir / "single.csv");
  CHECK(singles == std::vector<double>{1.5, 2.5});

  write_file(dir / "bad.csv", "value\n1.5\nnot-a-number\n");
  CHECK_THROWS_AS(read_values_csv(dir / "bad.csv"), ConfigError);
}

TEST_CASE("cmd_simulate writes k+1 pools plus metadata, deterministically") {
  const auto dir_a = temp_dir("sim_a");
  const auto dir_b = temp_dir("sim_b");
  auto cfg = ExperimentConfig::from_doc(ConfigDoc::parse_string(kQuicksortConfig));
  std::ostringstream out, err;

  cfg.out_dir = dir_a;
  REQUIRE(cmd_simulate(cfg, out, err) == kExitOk);
  cfg.out_dir = dir_b;
  REQUIRE(cmd_simulate(cfg, out, err) == kExitOk);

  int csv_count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir_a))
    if (entry.path().extension() == ".csv") ++csv_count;
  CHECK(csv_count == 4);  // k = 3
  CHECK(std::filesystem::exists(dir_a / "metadata.meta"));

  for (int level = 0; level <= 3; ++level) {
    const auto name = "pool_level_0" + std::to_string(level) + ".csv";
    CHECK(read_file(dir_a / name) == read_file(dir_b / name));
  }
}

TEST_CASE("cmd_oracle writes draws and honors the budget preflight") {
  const auto dir = temp_dir("oracle");
  auto cfg = ExperimentConfig::from_doc(ConfigDoc::parse_string(
      "[branching]\nkind = find\n[map]\nfamily = discounted-tree-sum\n[run]\nk = 5\nm = "
      "1000\nseed = 3\n"));
  cfg.out_dir = dir;
  std::ostringstream out, err;
  REQUIRE(cmd_oracle(cfg, out, err) == kExitOk);
  const auto values = read_values_csv(dir / "oracle.csv");
  CHECK(values.size() == 1000);

  // depth chosen so the estimated node count exceeds the budget
  auto deep = cfg;
  deep.k = 40;
  deep.budget.max_total_nodes = 10000;
  std::ostringstream err2;
  CHECK(cmd_oracle(deep, out, err2) == kExitRuntime);
  CHECK(err2.str().find("budget") != std::string::npos);
}

TEST_CASE("cmd_distance on files") {
  const auto dir = temp_dir("dist");
  write_file(dir / "a.csv", "0\n");
  write_file(dir / "b.csv", "1\n");
  std::ostringstream out, err;
  REQUIRE(cmd_distance(dir / "a.csv", dir / "b.csv", 2.0, out, err) == kExitOk);
  CHECK(out.str() == "1\n");

  std::ostringstream out2;
  REQUIRE(cmd_distance(dir / "a.csv", dir / "a.csv", 1.0, out2, err) == kExitOk);
  CHECK(out2.str() == "0\n");

  write_file(dir / "bad.csv", "zebra\n");
  CHECK(cmd_distance(dir / "a.csv", dir / "bad.csv", 1.0, out, err) == kExitConfig);
}

TEST_CASE("run_cli dispatches and reports config errors as exit 2") {
  const auto dir = temp_dir("cli");
  write_file(dir / "bad.cfg", "[branching]\nkind = ising\nbeta = -1\n[run]\nseed = 1\n");
  const auto cfg_path = (dir / "bad.cfg").string();
  const char* argv[] = {"sfpe", "validate", "--config", cfg_path.c_str()};
  CHECK(run_cli(4, argv) == kExitConfig);

  write_file(dir / "good.cfg", kQuicksortConfig);
  const auto good_path = (dir / "good.cfg").string();
  const char* argv2[] = {"sfpe", "validate", "--config", good_path.c_str()};
  CHECK(run_cli(4, argv2) == kExitOk);

  const char* argv3[] = {"sfpe", "nonsense"};
  CHECK(run_cli(2, argv3) == kExitConfig);
}

TEST_CASE("cmd_experiment writes the report bundle") {
  const auto dir = temp_dir("exp");
  auto cfg = ExperimentConfig::from_doc(ConfigDoc::parse_string(
      "[map]\nfamily = discounted-tree-sum\n[branching]\nkind = find\n[run]\nk = 2\n"
      "m_grid = 40,160\nreplications = 4\noracle_m = 2000\np = 2\nq = 3\nseed = 21\n"));
  cfg.out_dir = dir;
  std::ostringstream out, err;
  REQUIRE(cmd_experiment(cfg, out, err) == kExitOk);
  for (const char* name : {"constants.csv", "per_m.csv", "iid_arm.csv", "bounds.csv",
                           "rate.csv", "contraction.csv", "summary.txt", "metadata.meta"})
    CHECK(std::filesystem::exists(dir / name));
  const auto constants = read_file(dir / "constants.csv");
  CHECK(constants.find("H_p,0.66666") != std::string::npos);  // 2/(p+1) at p=2
}

TEST_CASE("quicksort experiment report carries the closed-form H_2") {
  const auto dir = temp_dir("exp_qs");
  auto cfg = ExperimentConfig::from_doc(ConfigDoc::parse_string(
      "[map]\nfamily = linear\nlinear_zero_mean = true\n[branching]\nkind = quicksort\n"
      "[run]\nk = 2\nm_grid = 40,160\nreplications = 4\noracle_m = 2000\np = 2\nseed = "
      "22\n"));
  cfg.out_dir = dir;
  std::ostringstream out, err;
  REQUIRE(cmd_experiment(cfg, out, err) == kExitOk);
  const auto constants = read_file(dir / "constants.csv");
  CHECK(constants.find("H_p,0.33333") != std::string::npos);  // (p-1)/(p+1) at p=2
  const auto summary = read_file(dir / "summary.txt");
  CHECK(summary.find("H_2 = 0.333333333333 (closed form)") != std::string::npos);
}
