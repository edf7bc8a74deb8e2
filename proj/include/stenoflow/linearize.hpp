#pragma once

// Time-varying linear error system along a stored reference trajectory:
//   e_t + Lambda(x,t) e_x + Gamma(x,t) e = 0,
//   e_u(0,t) = -a(t) e_v(0,t),   e_v(L,t) = -b(t) e_u(L,t).

#include <array>
#include <vector>

#include "stenoflow/fv_solver.hpp"
#include "stenoflow/model.hpp"

namespace stenoflow {

/// Dense (time, cell) array stored time-major.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(int nt, int nx, double value = 0.0)
      : nt_(nt), nx_(nx), data_(static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx), value) {}

  double& operator()(int k, int i) { return data_[index(k, i)]; }
  double operator()(int k, int i) const { return data_[index(k, i)]; }
  int times() const { return nt_; }
  int cells() const { return nx_; }

 private:
  std::size_t index(int k, int i) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }
  int nt_ = 0;
  int nx_ = 0;
  std::vector<double> data_;
};

struct ReferenceTrajectory {
  Grid grid;
  std::vector<double> times;
  SpaceTimeField u, v;    // Riemann coordinates at cell centers
  SpaceTimeField ux, vx;  // spatial derivatives
  std::vector<RiemannPoint> inlet;   // u*(0,t), v*(0,t)
  std::vector<RiemannPoint> outlet;  // u*(L,t), v*(L,t)

  int samples() const { return static_cast<int>(times.size()); }
};

/// Converts stored snapshots to Riemann coordinates; derivatives by central
/// differences in the interior and second-order one-sided differences at the
/// end cells. Throws std::domain_error if any state is outside the forward
/// subcritical domain.
ReferenceTrajectory build_reference(const Trajectory& traj, const Artery& artery);
ReferenceTrajectory build_reference(const std::vector<Snapshot>& snapshots, const Grid& grid, const Artery& artery);

/// Second-order spatial derivative of one row of cell values.
void differentiate(const double* values, int n, double dx, double* out);

struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
};

/// Lambda = diag((5u+3v)/8, (3u+5v)/8).
inline std::array<double, 2> lambda_at(double u, double v) {
  return {(5.0 * u + 3.0 * v) / 8.0, (3.0 * u + 5.0 * v) / 8.0};
}

/// Gamma at one point from the reference values and their x-derivatives.
Mat2 gamma_at(double u, double v, double ux, double vx, double kappa);

/// a = -(3u + 5v)/(5u + 3v) at the inlet trace.
double inlet_reflection(RiemannPoint inlet);

struct OutletReflection {
  double b = 0.0;
  bool degenerate = false;  // |dG/dv| < 1e-12 |dG/du|
};

/// b = (dG/du)/(dG/dv) of the Riemann-space outlet relation at the outlet trace.
OutletReflection outlet_reflection(RiemannPoint outlet, const Artery& artery);

struct LinearCoeffs {
  Grid grid;
  std::vector<double> times;
  SpaceTimeField lambda1, lambda2;                   // Lambda diagonal
  SpaceTimeField dlambda1_dx, dlambda2_dx;           // d Lambda / dx
  SpaceTimeField gamma11, gamma12, gamma21, gamma22;  // Gamma
  std::vector<double> lambda1_in, lambda2_in;        // Lambda at x = 0
  std::vector<double> lambda1_out, lambda2_out;      // Lambda at x = L
  std::vector<double> a_trace, b_trace;
  std::vector<char> b_degenerate;

  int samples() const { return static_cast<int>(times.size()); }
};

SpaceTimeField lambda_field(const ReferenceTrajectory& ref, int component);
void gamma_field(const ReferenceTrajectory& ref, const Artery& artery, SpaceTimeField& g11, SpaceTimeField& g12,
                 SpaceTimeField& g21, SpaceTimeField& g22);

/// All coefficient fields and boundary traces for the linear error system.
/// Degenerate outlet samples are reported on stderr with their time.
LinearCoeffs build_coefficients(const ReferenceTrajectory& ref, const Artery& artery);

/// Explicit second-order upwind integrator for the linear error system, used
/// to check that the coefficients are the first-order expansion of the
/// nonlinear model. Coefficients are interpolated linearly in time.
class LinearErrorSolver {
 public:
  explicit LinearErrorSolver(const LinearCoeffs& coeffs);

  /// Advances (eu, ev) from time t by dt with Heun's method.
  void step(std::vector<double>& eu, std::vector<double>& ev, double t, double dt) const;
  /// Largest stable dt for a given CFL number.
  double max_dt(double cfl = 0.5) const;

 private:
  struct Frame {
    std::vector<double> l1, l2, g11, g12, g21, g22;
    double a = 0.0, b = 0.0;
  };
  Frame frame_at(double t) const;
  void rhs(const Frame& f, const std::vector<double>& eu, const std::vector<double>& ev, std::vector<double>& du,
           std::vector<double>& dv) const;

  const LinearCoeffs& coeffs_;
};

}  // namespace stenoflow
