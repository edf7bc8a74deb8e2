#include "stenoflow/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stenoflow/linearize.hpp"

namespace stenoflow {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

long long to_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    s += format_double(values[i]);
  }
  return s;
}

std::string_view to_string(BoundarySlope b) { return b == BoundarySlope::zero ? "zero" : "one_sided"; }
std::string_view to_string(FrictionUpdate f) {
  return f == FrictionUpdate::backward_euler ? "backward_euler" : "trapezoidal";
}

void set_key(ScenarioConfig& c, const std::string& key, const std::string& value) {
  auto& a = c.artery;
  if (key == "length") a.length = to_double(key, value);
  else if (key == "r0") a.r0 = to_double(key, value);
  else if (key == "rho") a.rho = to_double(key, value);
  else if (key == "nu") a.nu = to_double(key, value);
  else if (key == "wall_thickness") a.wall_thickness = to_double(key, value);
  else if (key == "youngs_modulus") a.youngs_modulus = to_double(key, value);
  else if (key == "shape_b") a.shape_b = to_double(key, value);
  else if (key == "Ks") a.Ks = to_double(key, value);
  else if (key == "RT") a.RT = to_double(key, value);
  else if (key == "friction") {
    try {
      a.friction = parse_friction_mode(value);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "stenosis_loss") {
    try {
      a.stenosis_loss = parse_stenosis_loss(value);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "radii_cm") c.radii_cm = to_list(key, value);
  else if (key == "n") c.n = static_cast<int>(to_integer(key, value));
  else if (key == "dt") c.dt = to_double(key, value);
  else if (key == "t_end") c.t_end = to_double(key, value);
  else if (key == "warmup_cycles") c.warmup_cycles = static_cast<int>(to_integer(key, value));
  else if (key == "probe_interval") c.probe_interval = to_double(key, value);
  else if (key == "store_interval") c.store_interval = to_double(key, value);
  else if (key == "error_t_end") c.error_t_end = to_double(key, value);
  else if (key == "inflow_file") c.inflow_file = value;
  else if (key == "boundary_slope") {
    if (value == "zero") c.boundary_slope = BoundarySlope::zero;
    else if (value == "one_sided") c.boundary_slope = BoundarySlope::one_sided;
    else throw ConfigError("boundary_slope must be 'zero' or 'one_sided'");
  } else if (key == "friction_update") {
    if (value == "backward_euler") c.friction_update = FrictionUpdate::backward_euler;
    else if (value == "trapezoidal") c.friction_update = FrictionUpdate::trapezoidal;
    else throw ConfigError("friction_update must be 'backward_euler' or 'trapezoidal'");
  } else if (key == "p1") c.p1 = to_double(key, value);
  else if (key == "p2") c.p2 = to_double(key, value);
  else if (key == "mu_count") c.mu_count = static_cast<int>(to_integer(key, value));
  else if (key == "mu_min") c.mu_min = to_double(key, value);
  else if (key == "mu_max") c.mu_max = to_double(key, value);
  else if (key == "p2_grid") c.p2_grid = to_list(key, value);
  else if (key == "write_snapshots") c.write_snapshots = to_bool(key, value);
  else if (key == "seed") c.seed = static_cast<unsigned long long>(to_integer(key, value));
  else if (key == "workers") c.workers = static_cast<int>(to_integer(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

void ScenarioConfig::validate() const {
  if (radii_cm.empty()) throw ConfigError("radii_cm must list at least one stenosis radius");
  for (double r : radii_cm)
    if (!(r > 0.0) || r / 100.0 > artery.r0 * (1.0 + 1e-12))
      throw ConfigError("stenosis radius " + format_double(r) + " cm must be positive and at most r0");
  if (n < 4) throw ConfigError("n must be at least 4");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (warmup_cycles < 1) throw ConfigError("warmup_cycles must be at least 1");
  if (!(probe_interval > 0.0) || !(store_interval > 0.0)) throw ConfigError("output intervals must be positive");
  if (!(error_t_end > 0.0)) throw ConfigError("error_t_end must be positive");
  if (!(p1 > 0.0) || !(p2 > 0.0)) throw ConfigError("p1 and p2 must be positive");
  if (mu_count < 1 || !(mu_min > 0.0) || !(mu_max >= mu_min) || !std::isfinite(mu_max))
    throw ConfigError("invalid mu grid");
  if (p2_grid.empty()) throw ConfigError("p2_grid must not be empty");
  for (double p : p2_grid)
    if (!(p > 0.0)) throw ConfigError("p2_grid values must be positive");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  try {
    Artery check(artery);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("artery parameters: ") + e.what());
  }
}

InflowWaveform ScenarioConfig::inflow() const {
  if (inflow_file.empty()) return InflowWaveform::default_heartbeat();
  try {
    return InflowWaveform::from_file(inflow_file);
  } catch (const std::exception& e) {
    throw ConfigError("inflow_file: " + std::string(e.what()));
  }
}

SolverOptions ScenarioConfig::solver_options() const {
  SolverOptions s;
  s.boundary_slope = boundary_slope;
  s.friction_update = friction_update;
  return s;
}

std::vector<double> ScenarioConfig::mu_grid() const { return default_mu_grid(mu_count, mu_min, mu_max); }

ScenarioConfig parse_config(const std::string& text, ScenarioConfig base) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    set_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ScenarioConfig load_config(const fs::path& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::map<std::string, std::string> config_entries(const ScenarioConfig& c) {
  const auto& a = c.artery;
  return {
      {"length", format_double(a.length)},
      {"r0", format_double(a.r0)},
      {"rho", format_double(a.rho)},
      {"nu", format_double(a.nu)},
      {"wall_thickness", format_double(a.wall_thickness)},
      {"youngs_modulus", format_double(a.youngs_modulus)},
      {"shape_b", format_double(a.shape_b)},
      {"Ks", format_double(a.Ks)},
      {"RT", format_double(a.RT)},
      {"friction", std::string(to_string(a.friction))},
      {"stenosis_loss", std::string(to_string(a.stenosis_loss))},
      {"radii_cm", join(c.radii_cm)},
      {"n", std::to_string(c.n)},
      {"dt", format_double(c.dt)},
      {"t_end", format_double(c.t_end)},
      {"warmup_cycles", std::to_string(c.warmup_cycles)},
      {"probe_interval", format_double(c.probe_interval)},
      {"store_interval", format_double(c.store_interval)},
      {"error_t_end", format_double(c.error_t_end)},
      {"inflow_file", c.inflow_file},
      {"boundary_slope", std::string(to_string(c.boundary_slope))},
      {"friction_update", std::string(to_string(c.friction_update))},
      {"p1", format_double(c.p1)},
      {"p2", format_double(c.p2)},
      {"mu_count", std::to_string(c.mu_count)},
      {"mu_min", format_double(c.mu_min)},
      {"mu_max", format_double(c.mu_max)},
      {"p2_grid", join(c.p2_grid)},
      {"write_snapshots", c.write_snapshots ? "true" : "false"},
      {"seed", std::to_string(c.seed)},
      {"workers", std::to_string(c.workers)},
  };
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw std::invalid_argument("write_csv: header/column count mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns in " + path.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_double(columns[j][r]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string scenario_name(double radius_cm) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "r%.3fcm", radius_cm);
  return buf;
}

bool RunManifest::success() const {
  return std::all_of(scenarios.begin(), scenarios.end(), [](const ScenarioRecord& s) { return s.status == "ok"; });
}

void RunManifest::write(const fs::path& out_dir) const {
  nlohmann::ordered_json j;
  j["version"] = version;
  j["command"] = command;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : config_entries(config)) cfg[k] = v;
  j["config"] = cfg;
  j["files"] = files;
  auto& arr = j["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : scenarios) {
    nlohmann::ordered_json e;
    e["radius_cm"] = s.radius_cm;
    e["stenosis_percent"] = s.stenosis_percent;
    e["status"] = s.status;
    e["message"] = s.message;
    e["files"] = s.files;
    e["diagnostics"] = {{"steps", s.diagnostics.steps},
                        {"max_cfl", s.diagnostics.max_cfl},
                        {"max_inlet_iterations", s.diagnostics.max_inlet_iterations},
                        {"max_outlet_iterations", s.diagnostics.max_outlet_iterations},
                        {"mean_inlet_iterations", s.diagnostics.mean_inlet_iterations},
                        {"mean_outlet_iterations", s.diagnostics.mean_outlet_iterations},
                        {"periodicity_error", s.periodicity_error}};
    arr.push_back(e);
  }
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest.json");
  out << j.dump(2) << '\n';
}

namespace {

struct Shared {
  const ScenarioConfig& config;
  const Tasks& tasks;
  const fs::path& out_dir;
  const InflowWaveform& inflow;
  const StateField* systolic;  // no-stenosis systolic state, for the error experiment
};

void write_probes(const fs::path& dir, const Trajectory& traj, const Artery& artery, ScenarioRecord& rec,
                  const std::string& prefix) {
  std::vector<std::string> header = {"t_s"};
  std::vector<std::vector<double>> cols = {traj.probe_times};
  for (std::size_t p = 0; p < traj.probes.size(); ++p) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "x%.4fm", traj.probes[p].x);
    header.push_back(std::string("A_") + tag + "_m2");
    header.push_back(std::string("Q_") + tag + "_m3_per_s");
    header.push_back(std::string("dP_") + tag + "_Pa");
    cols.push_back(traj.probes[p].A);
    cols.push_back(traj.probes[p].Q);
    cols.push_back(traj.probes[p].dP);
  }
  write_csv(dir / "probes.csv", header, cols);
  rec.files.push_back(prefix + "probes.csv");

  std::vector<double> ai, qi, ao, qo, dp;
  for (const auto& b : traj.boundary) {
    ai.push_back(b.inlet.A);
    qi.push_back(b.inlet.Q());
    ao.push_back(b.outlet.A);
    qo.push_back(b.outlet.Q());
    dp.push_back(artery.pressure_drop(b.outlet));
  }
  write_csv(dir / "boundary.csv",
            {"t_s", "A_inlet_m2", "Q_inlet_m3_per_s", "A_outlet_m2", "Q_outlet_m3_per_s", "dP_outlet_Pa"},
            {traj.probe_times, ai, qi, ao, qo, dp});
  rec.files.push_back(prefix + "boundary.csv");
}

void write_snapshots(const fs::path& dir, const Trajectory& traj, ScenarioRecord& rec, const std::string& prefix) {
  std::vector<double> t, x, a, q;
  for (const auto& s : traj.snapshots)
    for (int i = 0; i < s.field.size(); ++i) {
      t.push_back(s.field.t);
      x.push_back(traj.grid.center(i));
      a.push_back(s.field.A[static_cast<std::size_t>(i)]);
      q.push_back(s.field.Q[static_cast<std::size_t>(i)]);
    }
  write_csv(dir / "snapshots.csv", {"t_s", "x_m", "A_m2", "Q_m3_per_s"}, {t, x, a, q});
  rec.files.push_back(prefix + "snapshots.csv");
}

void write_lyapunov(const fs::path& dir, const LinearCoeffs& co, const MuSearchResult& best, ScenarioRecord& rec,
                    const std::string& prefix) {
  const ConditionReport& rep = best.report;
  write_csv(dir / "lyapunov_traces.csv",
            {"t_s", "inlet_margin", "outlet_margin", "min_eig_R_per_s", "a", "b", "lambda1_inlet_m_per_s",
             "lambda2_inlet_m_per_s", "lambda1_outlet_m_per_s", "lambda2_outlet_m_per_s"},
            {rep.times, rep.inlet_margin, rep.outlet_margin, rep.min_eig_r, co.a_trace, co.b_trace, co.lambda1_in,
             co.lambda2_in, co.lambda1_out, co.lambda2_out});
  rec.files.push_back(prefix + "lyapunov_traces.csv");

  std::vector<double> t, x, lm;
  for (int k = 0; k < co.samples(); ++k)
    for (int i = 0; i < co.grid.n; ++i) {
      t.push_back(co.times[static_cast<std::size_t>(k)]);
      x.push_back(co.grid.center(i));
      lm.push_back(rep.lambda_min_r(k, i));
    }
  write_csv(dir / "lambda_min_R.csv", {"t_s", "x_m", "lambda_min_R_per_s"}, {t, x, lm});
  rec.files.push_back(prefix + "lambda_min_R.csv");
}

ScenarioRecord run_scenario(const Shared& sh, double radius_cm) {
  const ScenarioConfig& cfg = sh.config;
  ScenarioRecord rec;
  rec.radius_cm = radius_cm;
  rec.stenosis_percent = stenosis_percent(radius_cm / 100.0, cfg.artery);
  const std::string name = scenario_name(radius_cm);
  const std::string prefix = name + "/";
  const fs::path dir = sh.out_dir / name;
  try {
    fs::create_directories(dir);
    ArteryParams params = cfg.artery;
    params.set_stenosis_radius(radius_cm / 100.0);
    const Artery artery(params);

    WarmupOptions wo;
    wo.cycles = cfg.warmup_cycles;
    wo.dt = cfg.dt;
    wo.n = cfg.n;
    wo.solver = cfg.solver_options();
    const WarmupResult warm = warmup_to_diastole(artery, sh.inflow, wo);
    rec.periodicity_error = warm.periodicity_error;
    rec.diagnostics = warm.diagnostics;

    if (sh.tasks.simulate || sh.tasks.lyapunov) {
      SimulationOptions so;
      so.dt = cfg.dt;
      so.t_end = cfg.t_end;
      so.probe_interval = cfg.probe_interval;
      so.store_interval = cfg.store_interval;
      so.solver = cfg.solver_options();
      const Trajectory traj = simulate(artery, sh.inflow, warm.field, so);
      rec.diagnostics = traj.diagnostics;
      for (const auto& b : traj.boundary) {
        rec.peak_outlet_flow = std::max(rec.peak_outlet_flow, b.outlet.Q());
        rec.peak_pressure_drop = std::max(rec.peak_pressure_drop, std::fabs(artery.pressure_drop(b.outlet)));
      }
      if (sh.tasks.simulate) {
        write_probes(dir, traj, artery, rec, prefix);
        if (cfg.write_snapshots) write_snapshots(dir, traj, rec, prefix);
      }
      if (sh.tasks.lyapunov) {
        const ReferenceTrajectory ref = build_reference(traj, artery);
        const LinearCoeffs co = build_coefficients(ref, artery);
        const auto mus = cfg.mu_grid();
        const MuSearchResult best = search_mu(co, cfg.p1, cfg.p2, mus);
        rec.lyapunov_feasible = best.feasible;
        rec.lyapunov_mu = best.mu;
        if (auto d = decay_rate_estimate(best.report)) rec.decay_estimate = *d;
        rec.weight_search_feasible = search_weights(co, cfg.p2_grid, mus).best.feasible;
        rec.inlet_margin = best.inlet_margin;
        rec.outlet_margin = best.outlet_margin;
        rec.r_margin = best.r_margin;
        write_lyapunov(dir, co, best, rec, prefix);
      }
    }

    if (sh.tasks.error_experiment) {
      if (!sh.systolic) throw std::logic_error("systolic reference state missing");
      const ErrorSeries es = error_experiment(artery, sh.inflow, warm.field, *sh.systolic, cfg.error_t_end, cfg.dt,
                                              cfg.probe_interval, cfg.solver_options());
      rec.settling_time = es.settling_time(0.05);
      write_csv(dir / "error.csv", {"t_s", "linf_riemann_error_m_per_s"}, {es.times, es.norms});
      rec.files.push_back(prefix + "error.csv");
      rec.initial_error = es.norms.empty() ? 0.0 : es.norms.front();
    }
    rec.status = "ok";
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.message = e.what();
  }
  return rec;
}

void write_summaries(const ScenarioConfig& cfg, const Tasks& tasks, const fs::path& out_dir, RunManifest& m) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> radius, percent;
  for (const auto& s : m.scenarios) {
    radius.push_back(s.radius_cm);
    percent.push_back(s.stenosis_percent);
  }
  auto column = [&](auto get) {
    std::vector<double> c;
    for (const auto& s : m.scenarios) c.push_back(s.status == "ok" ? get(s) : nan);
    return c;
  };
  if (tasks.simulate) {
    write_csv(out_dir / "sweep_summary.csv",
              {"radius_cm", "stenosis_percent", "peak_Q_outlet_m3_per_s", "peak_abs_dP_outlet_Pa", "max_cfl",
               "periodicity_error"},
              {radius, percent, column([](const ScenarioRecord& s) { return s.peak_outlet_flow; }),
               column([](const ScenarioRecord& s) { return s.peak_pressure_drop; }),
               column([](const ScenarioRecord& s) { return s.diagnostics.max_cfl; }),
               column([](const ScenarioRecord& s) { return s.periodicity_error; })});
    m.files.push_back("sweep_summary.csv");
  }
  if (tasks.error_experiment) {
    write_csv(out_dir / "error_summary.csv",
              {"radius_cm", "stenosis_percent", "initial_error_m_per_s", "settling_time_5pct_s"},
              {radius, percent, column([](const ScenarioRecord& s) { return s.initial_error; }),
               column([](const ScenarioRecord& s) { return s.settling_time; })});
    m.files.push_back("error_summary.csv");
  }
  if (tasks.lyapunov) {
    write_csv(out_dir / "lyapunov_summary.csv",
              {"radius_cm", "stenosis_percent", "p1", "p2", "mu_per_m", "feasible", "min_inlet_margin",
               "min_outlet_margin", "r_margin", "decay_estimate_per_s", "weight_search_feasible"},
              {radius, percent, std::vector<double>(radius.size(), cfg.p1), std::vector<double>(radius.size(), cfg.p2),
               column([](const ScenarioRecord& s) { return s.lyapunov_mu; }),
               column([](const ScenarioRecord& s) { return s.lyapunov_feasible ? 1.0 : 0.0; }),
               column([](const ScenarioRecord& s) { return s.inlet_margin; }),
               column([](const ScenarioRecord& s) { return s.outlet_margin; }),
               column([](const ScenarioRecord& s) { return s.r_margin; }),
               column([nan](const ScenarioRecord& s) { return s.decay_estimate >= 0.0 ? s.decay_estimate : nan; }),
               column([](const ScenarioRecord& s) { return s.weight_search_feasible ? 1.0 : 0.0; })});
    m.files.push_back("lyapunov_summary.csv");
  }
}

}  // namespace

RunManifest run_campaign(const ScenarioConfig& config, const Tasks& tasks, const fs::path& out_dir,
                         const std::string& command) {
  config.validate();
  const InflowWaveform inflow = config.inflow();
  if (tasks.lyapunov && config.t_end < inflow.period() * (1.0 - 1e-9))
    throw ConfigError("the Lyapunov check needs t_end of at least one inflow period");
  try {
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    throw ConfigError("cannot create output directory " + out_dir.string() + ": " + e.what());
  }

  RunManifest m;
  m.version = kVersion;
  m.command = command;
  m.config = config;
  m.scenarios.resize(config.radii_cm.size());

  StateField systolic;
  bool have_systolic = false;
  std::string systolic_error;
  if (tasks.error_experiment) {
    try {
      ArteryParams healthy = config.artery;
      healthy.set_stenosis_radius(healthy.r0);
      WarmupOptions wo;
      wo.cycles = config.warmup_cycles;
      wo.dt = config.dt;
      wo.n = config.n;
      wo.solver = config.solver_options();
      systolic = systolic_peak_state(Artery(healthy), inflow, wo);
      have_systolic = true;
    } catch (const std::exception& e) {
      systolic_error = std::string("systolic reference state: ") + e.what();
    }
  }

  const Shared shared{config, tasks, out_dir, inflow, have_systolic ? &systolic : nullptr};
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < config.radii_cm.size(); i = next++) {
      if (tasks.error_experiment && !have_systolic) {
        ScenarioRecord rec;
        rec.radius_cm = config.radii_cm[i];
        rec.stenosis_percent = stenosis_percent(rec.radius_cm / 100.0, config.artery);
        rec.status = "failed";
        rec.message = systolic_error;
        m.scenarios[i] = rec;
        continue;
      }
      m.scenarios[i] = run_scenario(shared, config.radii_cm[i]);
    }
  };
  const int threads = std::min<int>(config.workers, static_cast<int>(config.radii_cm.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  write_summaries(config, tasks, out_dir, m);
  m.files.push_back("manifest.json");
  m.write(out_dir);
  return m;
}

RunManifest run_simulate(const ScenarioConfig& config, const fs::path& out_dir) {
  return run_campaign(config, {true, false, false}, out_dir, "simulate");
}

RunManifest run_error_experiment(const ScenarioConfig& config, const fs::path& out_dir) {
  return run_campaign(config, {false, true, false}, out_dir, "error-exp");
}

RunManifest run_lyapunov(const ScenarioConfig& config, const fs::path& out_dir) {
  return run_campaign(config, {false, false, true}, out_dir, "lyapunov");
}

std::string status_table(const RunManifest& m) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s  %-7s %s\n", "radius_cm", "percent", "status", "message");
  out << line;
  for (const auto& s : m.scenarios) {
    std::snprintf(line, sizeof line, "%-10.3f %10.2f  %-7s ", s.radius_cm, s.stenosis_percent, s.status.c_str());
    out << line << s.message << '\n';
  }
  return out.str();
}

}  // namespace stenoflow
