#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "stenoflow/scenario.hpp"

using namespace stenoflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ScenarioConfig tiny_config() {
  return parse_config(
      "radii_cm = 0.55, 0.22\n"
      "n = 20\n"
      "dt = 4e-5\n"
      "t_end = 0.8\n"
      "warmup_cycles = 1\n"
      "error_t_end = 0.05\n"
      "probe_interval = 5e-3\n"
      "store_interval = 5e-3\n"
      "mu_count = 5\n"
      "p2_grid = 0.98\n");
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse_config(
      "# comment line\n"
      "radii_cm = 0.55, 0.15   # trailing comment\n"
      "n = 40\n"
      "friction = kinematic\n"
      "boundary_slope = zero\n"
      "write_snapshots = false\n");
  REQUIRE(c.radii_cm.size() == 2);
  CHECK(c.radii_cm[1] == 0.15);
  CHECK(c.n == 40);
  CHECK(c.artery.friction == FrictionMode::kinematic);
  CHECK(c.boundary_slope == BoundarySlope::zero);
  CHECK_FALSE(c.write_snapshots);
  CHECK(c.dt == 1e-5);

  CHECK_THROWS_AS(parse_config("unknown_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("radii_cm =\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config("n = 2\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config("radii_cm = 0.7\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config("dt = -1\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config("friction = sticky\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("config entries round trip") {
  const ScenarioConfig c = tiny_config();
  std::ostringstream text;
  for (const auto& [k, v] : config_entries(c))
    if (!v.empty()) text << k << " = " << v << "\n";
  const ScenarioConfig back = parse_config(text.str());
  CHECK(config_entries(back) == config_entries(c));
}

TEST_CASE("formatting helpers") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(scenario_name(0.15) == "r0.150cm");
  const fs::path d = fresh_dir("stenoflow_csv_test");
  fs::create_directories(d);
  write_csv(d / "x.csv", {"a", "b"}, {{1.0, 2.0}, {3.0, 4.0}});
  CHECK(slurp(d / "x.csv") == "a,b\n1,3\n2,4\n");
  CHECK_THROWS(write_csv(d / "y.csv", {"a", "b"}, {{1.0}, {3.0, 4.0}}));
  fs::remove_all(d);
}

TEST_CASE("campaign output is deterministic") {
  ScenarioConfig c = tiny_config();
  const fs::path d1 = fresh_dir("stenoflow_det_1");
  const fs::path d2 = fresh_dir("stenoflow_det_2");
  const RunManifest m1 = run_campaign(c, {true, true, true}, d1, "test");
  c.workers = 2;
  const RunManifest m2 = run_campaign(c, {true, true, true}, d2, "test");
  REQUIRE(m1.success());
  REQUIRE(m2.success());
  CHECK(m1.scenarios.size() == 2);

  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(d1)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), d1);
    if (rel.extension() != ".csv") continue;
    REQUIRE(fs::exists(d2 / rel));
    CHECK_MESSAGE(slurp(entry.path()) == slurp(d2 / rel), rel.string());
    ++compared;
  }
  CHECK(compared >= 10);
  CHECK(fs::exists(d1 / "manifest.json"));

  // One summary row per scenario plus the header.
  const std::string summary = slurp(d1 / "sweep_summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
  fs::remove_all(d1);
  fs::remove_all(d2);
}
