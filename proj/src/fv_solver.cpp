#include "stenoflow/fv_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "stenoflow/root_find.hpp"

namespace stenoflow {

namespace {

std::string at_time(double t) {
  std::ostringstream os;
  os.precision(9);
  os << " (t = " << t << " s)";
  return os.str();
}

StatePoint to_point(const Conserved& U) { return {U.A, U.Q / U.A}; }

}  // namespace

Grid Grid::uniform(int n, double length) {
  if (n < 4) throw std::invalid_argument("grid needs at least 4 cells");
  if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
  return {n, length, length / n};
}

int Grid::nearest_cell(double x) const {
  const double s = x / dx - 0.5;
  int i = static_cast<int>(std::ceil(s - 0.5));
  return std::clamp(i, 0, n - 1);
}

StateField StateField::uniform(int n, double area, double flow, double t) {
  StateField f;
  f.A.assign(static_cast<std::size_t>(n), area);
  f.Q.assign(static_cast<std::size_t>(n), flow);
  f.t = t;
  return f;
}

double StateField::volume(double dx) const {
  double sum = 0.0;
  for (double a : A) sum += a;
  return dx * sum;
}

Conserved hll_flux(const Conserved& left, const Conserved& right, const Artery& artery) {
  const Conserved fl = artery.conservative_flux(left);
  if (left == right) return fl;
  const Conserved fr = artery.conservative_flux(right);
  const CharSpeeds wl = artery.char_speeds(to_point(left));
  const CharSpeeds wr = artery.char_speeds(to_point(right));
  const double sl = std::min(wl.backward, wr.backward);
  const double sr = std::max(wl.forward, wr.forward);
  if (sl >= 0.0) return fl;
  if (sr <= 0.0) return fr;
  const double inv = 1.0 / (sr - sl);
  return {(sr * fl.A - sl * fr.A + sl * sr * (right.A - left.A)) * inv,
          (sr * fl.Q - sl * fr.Q + sl * sr * (right.Q - left.Q)) * inv};
}

Conserved hll_flux(StatePoint left, StatePoint right, const Artery& artery) {
  if (!(left.A > 0.0) || !(right.A > 0.0)) throw std::domain_error("hll_flux: area must be positive");
  return hll_flux(Conserved{left.A, left.Q()}, Conserved{right.A, right.Q()}, artery);
}

Reconstruction muscl_reconstruct(const StateField& field, BoundarySlope boundary) {
  const int n = field.size();
  Reconstruction r;
  r.west.resize(static_cast<std::size_t>(n));
  r.east.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double sa = 0.0;
    double sq = 0.0;
    if (i > 0 && i < n - 1) {
      sa = van_leer_slope(field.A[i] - field.A[i - 1], field.A[i + 1] - field.A[i]);
      sq = van_leer_slope(field.Q[i] - field.Q[i - 1], field.Q[i + 1] - field.Q[i]);
    } else if (boundary == BoundarySlope::one_sided && n > 1) {
      const int j = i == 0 ? 1 : n - 2;
      const double sign = i == 0 ? 1.0 : -1.0;
      sa = sign * (field.A[j] - field.A[i]);
      sq = sign * (field.Q[j] - field.Q[i]);
    }
    r.west[i] = {field.A[i] - 0.5 * sa, field.Q[i] - 0.5 * sq};
    r.east[i] = {field.A[i] + 0.5 * sa, field.Q[i] + 0.5 * sq};
  }
  return r;
}

StatePoint apply_inlet_bc(double t, StatePoint interior, const InflowWaveform& inflow, const Artery& artery,
                          int* iterations) {
  if (!(interior.A > 0.0)) throw BoundarySolveError("inlet: interior area must be positive" + at_time(t), t);
  const double qin = inflow(t);
  // v = V - 4c(A) is carried out of the domain; A V = Qin closes the system.
  const double v_target = interior.V - 4.0 * artery.wave_speed(interior.A);
  auto fdf = [&](double A) {
    const double c = artery.wave_speed(A);
    return std::pair{qin / A - 4.0 * c - v_target, -qin / (A * A) - c / A};
  };
  const double lo = 1e-8 * artery.A0();
  const double hi = 10.0 * artery.A0();
  const double f_tol = 1e-13 * 4.0 * artery.rest_wave_speed();
  const auto root = safeguarded_newton(fdf, lo, hi, interior.A, 1e-15, f_tol);
  if (!root) throw BoundarySolveError("inlet: no bracketed root for A in (0, 10 A0]" + at_time(t), t);
  if (iterations) *iterations = root->iterations;
  return {root->x, qin / root->x};
}

StatePoint apply_outlet_bc(StatePoint interior, const Artery& artery, double area_hint, int* iterations, double t) {
  if (!(interior.A > 0.0)) throw BoundarySolveError("outlet: interior area must be positive" + at_time(t), t);
  const double u_target = interior.V + 4.0 * artery.wave_speed(interior.A);
  const double As = artery.As();
  const double RT = artery.RT();
  const double k = artery.stenosis_coefficient();
  auto fdf = [&](double A) {
    const double c = artery.wave_speed(A);
    const double V = u_target - 4.0 * c;
    const double dV = -c / A;
    const double m = A / As - 1.0;
    const double r = artery.pressure(A) - RT * A * V - k * V * V * m * m;
    const double dr = artery.pressure_derivative(A) - RT * (V + A * dV) -
                      k * (2.0 * V * dV * m * m + 2.0 * V * V * m / As);
    return std::pair{r, dr};
  };

  const double a_min = 1e-8 * artery.A0();
  const double a_max = 10.0 * artery.A0();
  const double hint = std::clamp(area_hint > 0.0 ? area_hint : interior.A, a_min, a_max);
  const double f_tol = 1e-15 * artery.beta() / artery.sqrt_A0();
  const auto [r_hint, dr_hint] = fdf(hint);
  if (std::fabs(r_hint) <= f_tol) {
    if (iterations) *iterations = 0;
    return {hint, u_target - 4.0 * artery.wave_speed(hint)};
  }

  // Grow a bracket around the hint, Newton direction first, so the root on
  // the branch through the previous boundary state is the one selected.
  const double newton_step = dr_hint != 0.0 ? -r_hint / dr_hint : 0.0;
  double delta = std::max(2.0 * std::fabs(newton_step), 1e-12 * hint);
  const bool up_first = newton_step >= 0.0;
  for (int expand = 0; expand < 80; ++expand, delta *= 4.0) {
    for (int side = 0; side < 2; ++side) {
      const bool up = (side == 0) == up_first;
      const double other = up ? std::min(hint + delta, a_max) : std::max(hint - delta, a_min);
      if (other == hint) continue;
      const double r_other = fdf(other).first;
      if ((r_other > 0.0) != (r_hint > 0.0) || r_other == 0.0) {
        const auto root = safeguarded_newton(fdf, std::min(hint, other), std::max(hint, other), hint, 1e-15, f_tol);
        if (!root) break;
        if (iterations) *iterations = root->iterations + expand + 1;
        return {root->x, u_target - 4.0 * artery.wave_speed(root->x)};
      }
    }
    if (hint - delta <= a_min && hint + delta >= a_max) break;
  }
  throw BoundarySolveError("outlet: no root of the stenosis relation on the admissible branch" + at_time(t), t);
}

FvSolver::FvSolver(Artery artery, InflowWaveform inflow, Grid grid, SolverOptions options)
    : artery_(std::move(artery)), inflow_(std::move(inflow)), grid_(grid), options_(options) {
  const auto n = static_cast<std::size_t>(grid_.n);
  west_.resize(n);
  east_.resize(n);
  flux_.resize(n + 1);
}

void FvSolver::check_field(const StateField& field, double t) const {
  if (field.size() != grid_.n) throw StepError("state field size does not match the grid" + at_time(t), t);
  for (int i = 0; i < grid_.n; ++i) {
    if (!(field.A[i] > 0.0))
      throw StepError("non-positive area in cell " + std::to_string(i) + at_time(t), t);
    const StatePoint s = field.point(i);
    const bool ok = options_.require_forward_flow ? artery_.in_subcritical_domain(s) : artery_.is_subcritical(s);
    if (!ok) throw StepError("cell " + std::to_string(i) + " left the subcritical domain" + at_time(t), t);
  }
}

BoundaryStates FvSolver::boundary_states(const StateField& field) {
  const Reconstruction rec = muscl_reconstruct(field, options_.boundary_slope);
  const int n = grid_.n;
  BoundaryStates b;
  b.inlet = apply_inlet_bc(field.t, to_point(rec.west[0]), inflow_, artery_);
  b.outlet = apply_outlet_bc(to_point(rec.east[n - 1]), artery_, outlet_area_hint_, nullptr, field.t);
  outlet_area_hint_ = b.outlet.A;
  return b;
}

StepReport FvSolver::step(StateField& field, double dt) {
  const int n = grid_.n;
  const double t = field.t;
  if (!(dt > 0.0)) throw StepError("time step must be positive" + at_time(t), t);
  if (field.size() != n) throw StepError("state field size does not match the grid" + at_time(t), t);
  const double dx = grid_.dx;
  const double half = 0.5 * dt / dx;
  const bool trapezoidal = options_.friction_update == FrictionUpdate::trapezoidal;

  StepReport report;
  double max_speed = 0.0;

  // Reconstruction and Hancock half-step predictor.
  for (int i = 0; i < n; ++i) {
    double sa = 0.0;
    double sq = 0.0;
    if (i > 0 && i < n - 1) {
      sa = van_leer_slope(field.A[i] - field.A[i - 1], field.A[i + 1] - field.A[i]);
      sq = van_leer_slope(field.Q[i] - field.Q[i - 1], field.Q[i + 1] - field.Q[i]);
    } else if (options_.boundary_slope == BoundarySlope::one_sided) {
      const int j = i == 0 ? 1 : n - 2;
      const double sign = i == 0 ? 1.0 : -1.0;
      sa = sign * (field.A[j] - field.A[i]);
      sq = sign * (field.Q[j] - field.Q[i]);
    }
    Conserved w{field.A[i] - 0.5 * sa, field.Q[i] - 0.5 * sq};
    Conserved e{field.A[i] + 0.5 * sa, field.Q[i] + 0.5 * sq};
    if (!(w.A > 0.0) || !(e.A > 0.0))
      throw StepError("non-positive reconstructed area in cell " + std::to_string(i) + at_time(t), t);
    const StatePoint s = field.point(i);
    max_speed = std::max(max_speed, std::fabs(s.V) + artery_.wave_speed(s.A));
    if (sa != 0.0 || sq != 0.0) {
      const Conserved corr = half * (artery_.conservative_flux(e) - artery_.conservative_flux(w));
      w -= corr;
      e -= corr;
      if (!(w.A > 0.0) || !(e.A > 0.0))
        throw StepError("non-positive predicted area in cell " + std::to_string(i) + at_time(t), t);
    }
    if (trapezoidal) {
      const double dq = 0.5 * dt * artery_.Kr() * s.V;
      w.Q -= dq;
      e.Q -= dq;
    }
    west_[i] = w;
    east_[i] = e;
  }

  // Characteristic boundary states at the half step.
  const double t_half = t + 0.5 * dt;
  const StatePoint inlet = apply_inlet_bc(t_half, to_point(west_[0]), inflow_, artery_, &report.inlet_iterations);
  const StatePoint outlet =
      apply_outlet_bc(to_point(east_[n - 1]), artery_, outlet_area_hint_, &report.outlet_iterations, t_half);
  max_speed = std::max({max_speed, std::fabs(inlet.V) + artery_.wave_speed(inlet.A),
                        std::fabs(outlet.V) + artery_.wave_speed(outlet.A)});
  report.cfl = max_speed * dt / dx;
  if (report.cfl > 1.0) throw StepError("CFL number " + std::to_string(report.cfl) + " exceeds 1" + at_time(t), t);

  flux_[0] = hll_flux(Conserved{inlet.A, inlet.Q()}, west_[0], artery_);
  for (int i = 1; i < n; ++i) flux_[i] = hll_flux(east_[i - 1], west_[i], artery_);
  flux_[n] = hll_flux(east_[n - 1], Conserved{outlet.A, outlet.Q()}, artery_);
  report.inlet_flux = flux_[0];
  report.outlet_flux = flux_[n];

  // Conservative update into scratch, then semi-implicit friction.
  StateField next;
  next.A.resize(static_cast<std::size_t>(n));
  next.Q.resize(static_cast<std::size_t>(n));
  next.t = t + dt;
  const double ratio = dt / dx;
  const double kr_dt = artery_.Kr() * dt;
  for (int i = 0; i < n; ++i) {
    const double a = field.A[i] - ratio * (flux_[i + 1].A - flux_[i].A);
    const double q = field.Q[i] - ratio * (flux_[i + 1].Q - flux_[i].Q);
    if (!(a > 0.0)) throw StepError("non-positive area in cell " + std::to_string(i) + at_time(t), t);
    next.A[i] = a;
    if (trapezoidal)
      next.Q[i] = (q - 0.5 * kr_dt * field.Q[i] / field.A[i]) / (1.0 + 0.5 * kr_dt / a);
    else
      next.Q[i] = q / (1.0 + kr_dt / a);
  }
  check_field(next, next.t);

  field.A.swap(next.A);
  field.Q.swap(next.Q);
  field.t = next.t;
  boundary_ = {inlet, outlet};
  outlet_area_hint_ = outlet.A;
  return report;
}

StateField step(const StateField& field, double dt, const InflowWaveform& inflow, const Artery& artery,
                const Grid& grid, SolverOptions options) {
  FvSolver solver(artery, inflow, grid, options);
  StateField out = field;
  solver.step(out, dt);
  return out;
}

namespace {

long long count_steps(double span, double dt) {
  const double k = span / dt;
  const long long steps = std::llround(k);
  if (std::fabs(k - static_cast<double>(steps)) > 1e-6 * std::max(1.0, k))
    throw std::invalid_argument("time span must be an integer multiple of dt");
  return steps;
}

long long cadence(double interval, double dt) {
  if (interval <= 0.0) return 0;
  return std::max(1LL, std::llround(interval / dt));
}

struct DiagnosticsAccumulator {
  SolverDiagnostics d;
  double inlet_sum = 0.0;
  double outlet_sum = 0.0;

  void add(const StepReport& r) {
    ++d.steps;
    d.max_cfl = std::max(d.max_cfl, r.cfl);
    d.max_inlet_iterations = std::max(d.max_inlet_iterations, r.inlet_iterations);
    d.max_outlet_iterations = std::max(d.max_outlet_iterations, r.outlet_iterations);
    inlet_sum += r.inlet_iterations;
    outlet_sum += r.outlet_iterations;
  }
  SolverDiagnostics finish() {
    if (d.steps > 0) {
      d.mean_inlet_iterations = inlet_sum / static_cast<double>(d.steps);
      d.mean_outlet_iterations = outlet_sum / static_cast<double>(d.steps);
    }
    return d;
  }
};

double relative_linf(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::fabs(a[i] - b[i]));
    norm = std::max(norm, std::fabs(b[i]));
  }
  return norm > 0.0 ? diff / norm : diff;
}

}  // namespace

Trajectory simulate(const Artery& artery, const InflowWaveform& inflow, const StateField& init,
                    const SimulationOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Grid grid = Grid::uniform(init.size(), artery.length());
  FvSolver solver(artery, inflow, grid, options.solver);

  Trajectory traj;
  traj.grid = grid;
  for (double frac : kProbeFractions) {
    ProbeTrace p;
    p.x = frac * grid.length;
    p.cell = grid.nearest_cell(p.x);
    traj.probes.push_back(std::move(p));
  }

  StateField field = init;
  const int last = grid.n - 1;
  // Residual at the linearly extrapolated outlet face.
  const Conserved face = muscl_reconstruct(field, BoundarySlope::one_sided).east[static_cast<std::size_t>(last)];
  const double residual = artery.outlet_residual({face.A, face.Q / face.A});
  if (std::fabs(residual) > options.compatibility_tol) {
    std::cerr << "warning: initial state is not compatible with the outlet condition (residual " << residual
              << " Pa)\n";
  }

  auto record_probes = [&](const BoundaryStates& b) {
    traj.probe_times.push_back(field.t);
    traj.boundary.push_back(b);
    for (auto& p : traj.probes) {
      const StatePoint s = field.point(p.cell);
      p.A.push_back(s.A);
      p.Q.push_back(s.Q());
      p.dP.push_back(artery.pressure_drop(s));
    }
  };

  const long long steps = count_steps(options.t_end, options.dt);
  const long long probe_every = cadence(options.probe_interval, options.dt);
  const long long store_every = cadence(options.store_interval, options.dt);
  const double t0 = init.t;

  const BoundaryStates b0 = solver.boundary_states(field);
  record_probes(b0);
  if (store_every > 0) traj.snapshots.push_back({field, b0});

  DiagnosticsAccumulator diag;
  for (long long k = 1; k <= steps; ++k) {
    diag.add(solver.step(field, options.dt));
    field.t = t0 + static_cast<double>(k) * options.dt;
    const bool probe = probe_every > 0 && (k % probe_every == 0 || k == steps);
    const bool store = store_every > 0 && k % store_every == 0;
    if (probe || store) {
      const BoundaryStates b = solver.boundary_states(field);
      if (probe) record_probes(b);
      if (store) traj.snapshots.push_back({field, b});
    }
  }
  traj.diagnostics = diag.finish();
  return traj;
}

WarmupResult warmup_to_diastole(const Artery& artery, const InflowWaveform& inflow, const WarmupOptions& options,
                                const double* systolic_phase, StateField* systolic) {
  if (options.cycles < 1) throw std::invalid_argument("warmup needs at least one cycle");
  const Grid grid = Grid::uniform(options.n, artery.length());
  SolverOptions relaxed = options.solver;
  relaxed.require_forward_flow = false;
  FvSolver solver(artery, inflow, grid, relaxed);

  StateField field = StateField::uniform(options.n, artery.A0(), 0.0);
  const long long per_cycle = count_steps(inflow.period(), options.dt);
  StateField previous;
  DiagnosticsAccumulator diag;
  for (int cycle = 0; cycle < options.cycles; ++cycle) {
    previous = field;
    const double t0 = static_cast<double>(cycle) * inflow.period();
    for (long long k = 1; k <= per_cycle; ++k) {
      diag.add(solver.step(field, options.dt));
      field.t = t0 + static_cast<double>(k) * options.dt;
    }
  }

  WarmupResult result;
  result.periodicity_error =
      options.cycles > 1 ? std::max(relative_linf(field.A, previous.A), relative_linf(field.Q, previous.Q)) : 1.0;
  result.periodic = result.periodicity_error <= options.periodicity_tol;
  if (!result.periodic) {
    std::cerr << "warning: period-boundary snapshots differ by " << result.periodicity_error
              << " (tolerance " << options.periodicity_tol << "); increase warm-up cycles\n";
  }

  if (systolic_phase && systolic) {
    StateField ahead = field;
    const long long k_peak = std::llround(*systolic_phase / options.dt);
    const double t0 = ahead.t;
    for (long long k = 1; k <= k_peak; ++k) {
      solver.step(ahead, options.dt);
      ahead.t = t0 + static_cast<double>(k) * options.dt;
    }
    *systolic = ahead;
    systolic->t = 0.0;
  }

  field.t = 0.0;
  result.boundary = solver.boundary_states(field);
  result.field = std::move(field);
  result.diagnostics = diag.finish();
  return result;
}

StateField systolic_peak_state(const Artery& artery, const InflowWaveform& inflow, const WarmupOptions& options) {
  const double phase = inflow.peak_phase();
  StateField systolic;
  warmup_to_diastole(artery, inflow, options, &phase, &systolic);
  return systolic;
}

double ErrorSeries::settling_time(double fraction) const {
  if (norms.empty()) return -1.0;
  const double threshold = fraction * norms.front();
  if (norms.front() == 0.0) return times.front();
  std::size_t last_above = norms.size();
  for (std::size_t i = norms.size(); i-- > 0;) {
    if (norms[i] >= threshold) {
      last_above = i;
      break;
    }
  }
  if (last_above == norms.size()) return times.front();
  if (last_above + 1 >= norms.size()) return -1.0;
  return times[last_above + 1];
}

double riemann_linf_distance(const StateField& a, const StateField& b, const Artery& artery) {
  double err = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const RiemannPoint ra = artery.to_riemann(a.point(i));
    const RiemannPoint rb = artery.to_riemann(b.point(i));
    err = std::max({err, std::fabs(ra.u - rb.u), std::fabs(ra.v - rb.v)});
  }
  return err;
}

ErrorSeries error_experiment(const Artery& artery, const InflowWaveform& inflow, const StateField& init_ref,
                             const StateField& init_alt, double t_end, double dt, double probe_interval,
                             SolverOptions solver_options) {
  if (init_ref.size() != init_alt.size()) throw std::invalid_argument("initial fields differ in size");
  const Grid grid = Grid::uniform(init_ref.size(), artery.length());
  FvSolver ref_solver(artery, inflow, grid, solver_options);
  FvSolver alt_solver(artery, inflow, grid, solver_options);
  StateField ref = init_ref;
  StateField alt = init_alt;
  alt.t = ref.t;

  ErrorSeries series;
  series.times.push_back(ref.t);
  series.norms.push_back(riemann_linf_distance(alt, ref, artery));
  const long long steps = count_steps(t_end, dt);
  const long long every = cadence(probe_interval, dt);
  const double t0 = ref.t;
  for (long long k = 1; k <= steps; ++k) {
    ref_solver.step(ref, dt);
    alt_solver.step(alt, dt);
    ref.t = alt.t = t0 + static_cast<double>(k) * dt;
    if (k % every == 0 || k == steps) {
      series.times.push_back(ref.t);
      series.norms.push_back(riemann_linf_distance(alt, ref, artery));
    }
  }
  return series;
}

}  // namespace stenoflow
