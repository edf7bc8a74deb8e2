#pragma once

// Configuration, stenosis-sweep orchestration and CSV/JSON output.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stenoflow/fv_solver.hpp"
#include "stenoflow/inflow.hpp"
#include "stenoflow/lyapunov.hpp"
#include "stenoflow/model.hpp"

namespace stenoflow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  ArteryParams artery;                                           // stenosis radius overridden per scenario
  std::vector<double> radii_cm = {0.55, 0.4, 0.3, 0.22, 0.17, 0.15};
  int n = 80;
  double dt = 1e-5;            // s
  double t_end = 0.8;          // reference run length, s
  int warmup_cycles = 6;
  double probe_interval = 1e-3;
  double store_interval = 1e-3;
  double error_t_end = 3.0;    // error experiment horizon, s
  std::string inflow_file;     // empty: built-in heartbeat
  BoundarySlope boundary_slope = BoundarySlope::one_sided;
  FrictionUpdate friction_update = FrictionUpdate::trapezoidal;
  double p1 = 1.0;
  double p2 = 0.98;
  int mu_count = 40;
  double mu_min = 1e-3;
  double mu_max = 50.0;
  std::vector<double> p2_grid = {0.90, 0.92, 0.94, 0.96, 0.98, 1.00, 1.02, 1.04, 1.06, 1.08, 1.10};
  bool write_snapshots = true;
  unsigned long long seed = 1;
  int workers = 1;

  /// Throws ConfigError.
  void validate() const;
  InflowWaveform inflow() const;
  SolverOptions solver_options() const;
  std::vector<double> mu_grid() const;
};

/// Flat "key = value" text; lists are comma separated; '#' starts a comment.
/// Unknown keys are errors. Throws ConfigError.
ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base = {});
/// Every key with its resolved value, in parse_config syntax.
std::map<std::string, std::string> config_entries(const ScenarioConfig& config);

/// Decimal with 17 significant digits (%.17g).
std::string format_double(double value);

/// Column-oriented CSV writer; values are written with format_double.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

/// Directory name used for one stenosis level, e.g. "r0.150cm".
std::string scenario_name(double radius_cm);

struct ScenarioRecord {
  double radius_cm = 0.0;
  double stenosis_percent = 0.0;
  std::string status = "pending";  // ok | failed
  std::string message;
  std::vector<std::string> files;  // relative to the output directory
  SolverDiagnostics diagnostics;
  double periodicity_error = 0.0;
  double peak_outlet_flow = 0.0;        // m^3/s
  double peak_pressure_drop = 0.0;      // Pa
  double initial_error = 0.0;           // m/s
  double settling_time = -1.0;          // s, 5 % threshold
  bool lyapunov_feasible = false;
  double lyapunov_mu = 0.0;
  double inlet_margin = 0.0;            // minima over time at the selected mu
  double outlet_margin = 0.0;
  double r_margin = 0.0;                // min lambda_min(R) / max |eig R|
  double decay_estimate = -1.0;         // 1/s, negative when infeasible
  bool weight_search_feasible = false;
};

struct RunManifest {
  std::string version;
  std::string command;
  ScenarioConfig config;
  std::vector<ScenarioRecord> scenarios;
  std::vector<std::string> files;  // run-level outputs

  bool success() const;
  void write(const std::filesystem::path& out_dir) const;
};

struct Tasks {
  bool simulate = false;
  bool error_experiment = false;
  bool lyapunov = false;
};

/// Runs the selected tasks for every radius in `config`. Scenarios run on up
/// to config.workers threads, each writing only inside its own directory; a
/// failing scenario is recorded and the others continue. Writes the summary
/// CSVs and manifest.json into `out_dir`.
RunManifest run_campaign(const ScenarioConfig& config, const Tasks& tasks, const std::filesystem::path& out_dir,
                         const std::string& command = "");

RunManifest run_simulate(const ScenarioConfig& config, const std::filesystem::path& out_dir);
RunManifest run_error_experiment(const ScenarioConfig& config, const std::filesystem::path& out_dir);
RunManifest run_lyapunov(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// One line per scenario: radius, percent, status, message.
std::string status_table(const RunManifest& manifest);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stenoflow
