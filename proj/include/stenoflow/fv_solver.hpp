#pragma once

// Second-order finite-volume integrator for the (A, Q) system: MUSCL-Hancock
// with van Leer slopes, HLL interface fluxes, characteristic boundary states
// and semi-implicit friction.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "stenoflow/inflow.hpp"
#include "stenoflow/model.hpp"

namespace stenoflow {

struct Grid {
  int n = 80;
  double length = 0.06;
  double dx = 0.06 / 80;

  /// n >= 4 cells of equal width over [0, length].
  static Grid uniform(int n, double length);
  double center(int i) const { return (i + 0.5) * dx; }
  /// Index of the cell center closest to x (ties go to the lower index).
  int nearest_cell(double x) const;
};

/// Cell-averaged conservative state at one instant.
struct StateField {
  std::vector<double> A;
  std::vector<double> Q;
  double t = 0.0;

  static StateField uniform(int n, double area, double flow, double t = 0.0);
  int size() const { return static_cast<int>(A.size()); }
  Conserved cell(int i) const { return {A[i], Q[i]}; }
  StatePoint point(int i) const { return {A[i], Q[i] / A[i]}; }
  /// dx * sum(A)
  double volume(double dx) const;
};

struct BoundaryStates {
  StatePoint inlet;   // x = 0
  StatePoint outlet;  // x = L
};

/// Base for failures inside a time step; carries the simulation time.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

class BoundarySolveError : public SolverError {
 public:
  using SolverError::SolverError;
};

class StepError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Two-wave HLL flux with sL = min(lambda2), sR = max(lambda1).
Conserved hll_flux(const Conserved& left, const Conserved& right, const Artery& artery);
Conserved hll_flux(StatePoint left, StatePoint right, const Artery& artery);

/// Slope treatment in the first and last cell, which have a single neighbour.
enum class BoundarySlope {
  zero,       // piecewise constant
  one_sided,  // difference towards the interior neighbour
};

/// Per-cell face values: interface i+1/2 sees east[i] on its left and
/// west[i+1] on its right. Slopes are van Leer limited componentwise on (A, Q).
struct Reconstruction {
  std::vector<Conserved> west;
  std::vector<Conserved> east;
};

Reconstruction muscl_reconstruct(const StateField& field, BoundarySlope boundary = BoundarySlope::one_sided);

/// van Leer limited slope from backward and forward differences.
inline double van_leer_slope(double backward, double forward) {
  const double prod = backward * forward;
  return prod > 0.0 ? 2.0 * prod / (backward + forward) : 0.0;
}

/// Inlet boundary state: A V = Qin(t) with the backward invariant v taken
/// from `interior`. Safeguarded Newton on A in (0, 10 A0].
StatePoint apply_inlet_bc(double t, StatePoint interior, const InflowWaveform& inflow, const Artery& artery,
                          int* iterations = nullptr);

/// Outlet boundary state: outlet_residual = 0 with the forward invariant u
/// taken from `interior`. The root nearest `area_hint` is selected, so
/// passing the previous boundary area follows one physical branch.
/// `area_hint <= 0` uses the interior area. `t` is only used for diagnostics.
StatePoint apply_outlet_bc(StatePoint interior, const Artery& artery, double area_hint = 0.0,
                           int* iterations = nullptr, double t = 0.0);

/// Semi-implicit friction update of Q after the hyperbolic step.
enum class FrictionUpdate {
  backward_euler,  // Q <- Q / (1 + dt Kr / A_new), first order in time
  trapezoidal,     // half explicit, half implicit; friction also enters the half-step predictor
};

struct SolverOptions {
  BoundarySlope boundary_slope = BoundarySlope::one_sided;
  FrictionUpdate friction_update = FrictionUpdate::trapezoidal;
  /// Reject steps leaving the forward-flow subcritical domain. When false only
  /// A > 0 and |V| < c are enforced (rest states, start-up transients).
  bool require_forward_flow = true;
};

struct StepReport {
  double cfl = 0.0;
  int inlet_iterations = 0;
  int outlet_iterations = 0;
  Conserved inlet_flux;   // HLL flux through x = 0
  Conserved outlet_flux;  // HLL flux through x = L
};

/// Stateful stepper: owns scratch buffers and the outlet branch tracker.
class FvSolver {
 public:
  FvSolver(Artery artery, InflowWaveform inflow, Grid grid, SolverOptions options = {});

  /// Advances `field` by dt in place. Throws StepError (CFL > 1, A <= 0,
  /// domain violation) or BoundarySolveError; `field` is untouched on error.
  StepReport step(StateField& field, double dt);

  /// Boundary states for the current field without advancing it.
  BoundaryStates boundary_states(const StateField& field);
  /// Boundary states used by the most recent step (at its midpoint time).
  const BoundaryStates& last_boundary() const { return boundary_; }

  const Artery& artery() const { return artery_; }
  const InflowWaveform& inflow() const { return inflow_; }
  const Grid& grid() const { return grid_; }
  const SolverOptions& options() const { return options_; }

 private:
  void check_field(const StateField& field, double t) const;

  Artery artery_;
  InflowWaveform inflow_;
  Grid grid_;
  SolverOptions options_;
  BoundaryStates boundary_{};
  double outlet_area_hint_ = 0.0;
  std::vector<Conserved> west_, east_, flux_;
  std::vector<double> slope_a_, slope_q_;
};

/// One step on a copy; convenience wrapper around FvSolver.
StateField step(const StateField& field, double dt, const InflowWaveform& inflow, const Artery& artery,
                const Grid& grid, SolverOptions options = {});

inline constexpr std::array<double, 5> kProbeFractions = {0.0, 0.25, 0.5, 0.75, 1.0};

struct ProbeTrace {
  double x = 0.0;
  int cell = 0;
  std::vector<double> A, Q, dP;
};

struct Snapshot {
  StateField field;
  BoundaryStates boundary;
};

struct SolverDiagnostics {
  long long steps = 0;
  double max_cfl = 0.0;
  int max_inlet_iterations = 0;
  int max_outlet_iterations = 0;
  double mean_inlet_iterations = 0.0;
  double mean_outlet_iterations = 0.0;
};

struct Trajectory {
  Grid grid;
  std::vector<double> probe_times;
  std::vector<ProbeTrace> probes;          // at kProbeFractions of L
  std::vector<BoundaryStates> boundary;    // at probe_times
  std::vector<Snapshot> snapshots;         // at store_interval
  SolverDiagnostics diagnostics;
};

struct SimulationOptions {
  double dt = 1e-6;
  double t_end = 0.8;
  double probe_interval = 1e-3;
  /// Snapshot cadence; <= 0 disables snapshots.
  double store_interval = 1e-3;
  /// Loose tolerance (Pa) for the initial outlet compatibility warning.
  double compatibility_tol = 50.0;
  SolverOptions solver;
};

/// Advances `init` to init.t + t_end. Probes and snapshots include t = init.t.
/// Solver errors propagate (the message carries the failing time).
Trajectory simulate(const Artery& artery, const InflowWaveform& inflow, const StateField& init,
                    const SimulationOptions& options);

struct WarmupOptions {
  int cycles = 6;
  double dt = 1e-6;
  int n = 80;
  double periodicity_tol = 1e-3;
  SolverOptions solver;
};

struct WarmupResult {
  StateField field;  // time reset to 0 (start of a period)
  BoundaryStates boundary;
  /// L-infinity distance between the last two period-boundary snapshots,
  /// relative to the L-infinity norm of the last one (max over A and Q).
  double periodicity_error = 0.0;
  bool periodic = false;
  SolverDiagnostics diagnostics;
};

/// Runs from a uniform start (A0, mean inflow) through `cycles` periods and
/// returns the state right before the next heartbeat. Emits a warning on
/// stderr when successive period-boundary snapshots differ by more than the
/// tolerance. If `systolic_phase` is set, additionally continues to that
/// phase of the next period and stores the state in `*systolic`.
WarmupResult warmup_to_diastole(const Artery& artery, const InflowWaveform& inflow, const WarmupOptions& options,
                                const double* systolic_phase = nullptr, StateField* systolic = nullptr);

/// State at the systolic peak (peak of Qin) after warming up; time reset to 0.
StateField systolic_peak_state(const Artery& artery, const InflowWaveform& inflow, const WarmupOptions& options);

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> norms;  // max over cells of |u - u*|, |v - v*|

  /// Earliest sample time after which the norm stays below fraction * norms[0];
  /// negative if never reached within the series.
  double settling_time(double fraction = 0.05) const;
};

/// Max over cells and both components of the Riemann-coordinate difference.
double riemann_linf_distance(const StateField& a, const StateField& b, const Artery& artery);

/// Runs the reference and the perturbed trajectory with the same inflow and
/// records the L-infinity Riemann error every probe_interval.
ErrorSeries error_experiment(const Artery& artery, const InflowWaveform& inflow, const StateField& init_ref,
                             const StateField& init_alt, double t_end, double dt, double probe_interval = 1e-3,
                             SolverOptions solver = {});

}  // namespace stenoflow
