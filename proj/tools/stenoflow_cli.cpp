#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stenoflow/scenario.hpp"

using namespace stenoflow;

namespace {

enum ExitCode { kOk = 0, kScenarioFailed = 1, kConfigError = 2, kInternalError = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stenosed-artery blood flow simulation and stability analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  long long seed = -1;
  int workers = 0;
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "seed recorded in the manifest (randomized checks)");
  app.add_option("--workers", workers, "concurrent scenarios (overrides the config)");

  double radius_cm = 0.0;
  auto* simulate = app.add_subcommand("simulate", "reference run for a single stenosis radius");
  simulate->add_option("--radius", radius_cm, "throat radius in cm (default: first configured radius)");
  auto* sweep = app.add_subcommand("sweep", "reference runs for every configured radius");
  auto* error_exp = app.add_subcommand("error-exp", "convergence of a systolic start towards the reference");
  auto* lyapunov = app.add_subcommand("lyapunov", "Lyapunov condition check and decay-rate estimate");
  auto* all = app.add_subcommand("all", "sweep, error-exp and lyapunov in one pass");

  CLI11_PARSE(app, argc, argv);

  ScenarioConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    if (seed >= 0) config.seed = static_cast<unsigned long long>(seed);
    if (workers > 0) config.workers = workers;
    Tasks tasks;
    std::string command;
    if (simulate->parsed()) {
      if (radius_cm > 0.0) config.radii_cm = {radius_cm};
      else if (!config.radii_cm.empty()) config.radii_cm.resize(1);
      tasks.simulate = true;
      command = "simulate";
    } else if (sweep->parsed()) {
      tasks.simulate = true;
      command = "sweep";
    } else if (error_exp->parsed()) {
      tasks.error_experiment = true;
      command = "error-exp";
    } else if (lyapunov->parsed()) {
      tasks.lyapunov = true;
      command = "lyapunov";
    } else if (all->parsed()) {
      tasks = {true, true, true};
      command = "all";
    }
    const RunManifest manifest = run_campaign(config, tasks, out_dir, command);
    std::cout << status_table(manifest);
    return manifest.success() ? kOk : kScenarioFailed;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternalError;
  }
}
