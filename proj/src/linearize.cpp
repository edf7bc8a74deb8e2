#include "stenoflow/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace stenoflow {

void differentiate(const double* values, int n, double dx, double* out) {
  if (n < 3) throw std::invalid_argument("differentiate: need at least 3 cells");
  const double inv2 = 0.5 / dx;
  out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv2;
  for (int i = 1; i < n - 1; ++i) out[i] = (values[i + 1] - values[i - 1]) * inv2;
  out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv2;
}

ReferenceTrajectory build_reference(const std::vector<Snapshot>& snapshots, const Grid& grid, const Artery& artery) {
  if (snapshots.empty()) throw std::invalid_argument("build_reference: no snapshots stored");
  const int nt = static_cast<int>(snapshots.size());
  const int n = grid.n;
  ReferenceTrajectory ref;
  ref.grid = grid;
  ref.u = SpaceTimeField(nt, n);
  ref.v = SpaceTimeField(nt, n);
  ref.ux = SpaceTimeField(nt, n);
  ref.vx = SpaceTimeField(nt, n);
  std::vector<double> row_u(static_cast<std::size_t>(n)), row_v(static_cast<std::size_t>(n));
  std::vector<double> d(static_cast<std::size_t>(n));

  auto require_domain = [&](StatePoint s, double t, const std::string& where) {
    if (!artery.in_subcritical_domain(s))
      throw std::domain_error("reference state at " + where + " (t = " + std::to_string(t) +
                              ") is outside the subcritical forward-flow domain");
  };

  for (int k = 0; k < nt; ++k) {
    const auto& snap = snapshots[static_cast<std::size_t>(k)];
    if (snap.field.size() != n) throw std::invalid_argument("build_reference: snapshot size mismatch");
    if (k > 0 && !(snap.field.t > ref.times.back()))
      throw std::invalid_argument("build_reference: snapshot times must increase");
    ref.times.push_back(snap.field.t);
    for (int i = 0; i < n; ++i) {
      const StatePoint s = snap.field.point(i);
      require_domain(s, snap.field.t, "cell " + std::to_string(i));
      const RiemannPoint r = artery.to_riemann(s);
      row_u[static_cast<std::size_t>(i)] = r.u;
      row_v[static_cast<std::size_t>(i)] = r.v;
      ref.u(k, i) = r.u;
      ref.v(k, i) = r.v;
    }
    differentiate(row_u.data(), n, grid.dx, d.data());
    for (int i = 0; i < n; ++i) ref.ux(k, i) = d[static_cast<std::size_t>(i)];
    differentiate(row_v.data(), n, grid.dx, d.data());
    for (int i = 0; i < n; ++i) ref.vx(k, i) = d[static_cast<std::size_t>(i)];

    require_domain(snap.boundary.inlet, snap.field.t, "x = 0");
    require_domain(snap.boundary.outlet, snap.field.t, "x = L");
    ref.inlet.push_back(artery.to_riemann(snap.boundary.inlet));
    ref.outlet.push_back(artery.to_riemann(snap.boundary.outlet));
  }
  return ref;
}

ReferenceTrajectory build_reference(const Trajectory& traj, const Artery& artery) {
  return build_reference(traj.snapshots, traj.grid, artery);
}

Mat2 gamma_at(double u, double v, double ux, double vx, double kappa) {
  const double d = u - v;
  if (d == 0.0) throw std::domain_error("gamma: u* == v*");
  const double d2 = d * d;
  const double inv5 = 1.0 / (d2 * d2 * d);
  const double back = kappa * (3.0 * u + 5.0 * v) * inv5;
  const double fwd = kappa * (5.0 * u + 3.0 * v) * inv5;
  return {0.625 * ux - back, 0.375 * ux + fwd, 0.375 * vx - back, 0.625 * vx + fwd};
}

double inlet_reflection(RiemannPoint inlet) {
  const double den = 5.0 * inlet.u + 3.0 * inlet.v;
  if (den == 0.0) throw std::domain_error("inlet reflection: degenerate boundary (5u + 3v = 0)");
  return -(3.0 * inlet.u + 5.0 * inlet.v) / den;
}

OutletReflection outlet_reflection(RiemannPoint outlet, const Artery& artery) {
  const RelationGradient g = artery.outlet_relation(outlet);
  OutletReflection r;
  if (std::fabs(g.d_dv) < 1e-12 * std::fabs(g.d_du) || g.d_dv == 0.0) {
    r.degenerate = true;
    r.b = 0.0;
    return r;
  }
  r.b = g.d_du / g.d_dv;
  return r;
}

SpaceTimeField lambda_field(const ReferenceTrajectory& ref, int component) {
  const int nt = ref.samples();
  const int n = ref.grid.n;
  SpaceTimeField out(nt, n);
  for (int k = 0; k < nt; ++k)
    for (int i = 0; i < n; ++i) out(k, i) = lambda_at(ref.u(k, i), ref.v(k, i))[static_cast<std::size_t>(component)];
  return out;
}

void gamma_field(const ReferenceTrajectory& ref, const Artery& artery, SpaceTimeField& g11, SpaceTimeField& g12,
                 SpaceTimeField& g21, SpaceTimeField& g22) {
  const int nt = ref.samples();
  const int n = ref.grid.n;
  g11 = g12 = g21 = g22 = SpaceTimeField(nt, n);
  for (int k = 0; k < nt; ++k) {
    for (int i = 0; i < n; ++i) {
      const Mat2 g = gamma_at(ref.u(k, i), ref.v(k, i), ref.ux(k, i), ref.vx(k, i), artery.kappa());
      g11(k, i) = g.a11;
      g12(k, i) = g.a12;
      g21(k, i) = g.a21;
      g22(k, i) = g.a22;
    }
  }
}

LinearCoeffs build_coefficients(const ReferenceTrajectory& ref, const Artery& artery) {
  LinearCoeffs c;
  c.grid = ref.grid;
  c.times = ref.times;
  c.lambda1 = lambda_field(ref, 0);
  c.lambda2 = lambda_field(ref, 1);
  const int nt = ref.samples();
  const int n = ref.grid.n;
  c.dlambda1_dx = SpaceTimeField(nt, n);
  c.dlambda2_dx = SpaceTimeField(nt, n);
  for (int k = 0; k < nt; ++k) {
    for (int i = 0; i < n; ++i) {
      c.dlambda1_dx(k, i) = (5.0 * ref.ux(k, i) + 3.0 * ref.vx(k, i)) / 8.0;
      c.dlambda2_dx(k, i) = (3.0 * ref.ux(k, i) + 5.0 * ref.vx(k, i)) / 8.0;
    }
  }
  gamma_field(ref, artery, c.gamma11, c.gamma12, c.gamma21, c.gamma22);
  for (int k = 0; k < nt; ++k) {
    const RiemannPoint in = ref.inlet[static_cast<std::size_t>(k)];
    const RiemannPoint out = ref.outlet[static_cast<std::size_t>(k)];
    const auto lin = lambda_at(in.u, in.v);
    const auto lout = lambda_at(out.u, out.v);
    c.lambda1_in.push_back(lin[0]);
    c.lambda2_in.push_back(lin[1]);
    c.lambda1_out.push_back(lout[0]);
    c.lambda2_out.push_back(lout[1]);
    c.a_trace.push_back(inlet_reflection(in));
    const OutletReflection b = outlet_reflection(out, artery);
    c.b_trace.push_back(b.b);
    c.b_degenerate.push_back(b.degenerate ? 1 : 0);
    if (b.degenerate)
      std::cerr << "warning: degenerate outlet linearization (dG/dv ~ 0) at t = " << c.times.back() << " s\n";
  }
  return c;
}

LinearErrorSolver::LinearErrorSolver(const LinearCoeffs& coeffs) : coeffs_(coeffs) {
  if (coeffs_.samples() < 1) throw std::invalid_argument("linear solver: empty coefficient set");
}

double LinearErrorSolver::max_dt(double cfl) const {
  double speed = 0.0;
  for (int k = 0; k < coeffs_.samples(); ++k)
    for (int i = 0; i < coeffs_.grid.n; ++i)
      speed = std::max({speed, std::fabs(coeffs_.lambda1(k, i)), std::fabs(coeffs_.lambda2(k, i))});
  return cfl * coeffs_.grid.dx / speed;
}

LinearErrorSolver::Frame LinearErrorSolver::frame_at(double t) const {
  const auto& times = coeffs_.times;
  int k0 = 0;
  double w = 0.0;
  if (times.size() > 1) {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const int hi = std::clamp(static_cast<int>(it - times.begin()), 1, static_cast<int>(times.size()) - 1);
    k0 = hi - 1;
    w = std::clamp((t - times[static_cast<std::size_t>(k0)]) /
                       (times[static_cast<std::size_t>(hi)] - times[static_cast<std::size_t>(k0)]),
                   0.0, 1.0);
  }
  const int k1 = times.size() > 1 ? k0 + 1 : k0;
  const int n = coeffs_.grid.n;
  Frame f;
  auto lerp_row = [&](const SpaceTimeField& field, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = (1.0 - w) * field(k0, i) + w * field(k1, i);
  };
  lerp_row(coeffs_.lambda1, f.l1);
  lerp_row(coeffs_.lambda2, f.l2);
  lerp_row(coeffs_.gamma11, f.g11);
  lerp_row(coeffs_.gamma12, f.g12);
  lerp_row(coeffs_.gamma21, f.g21);
  lerp_row(coeffs_.gamma22, f.g22);
  const auto lerp = [&](const std::vector<double>& trace) {
    return (1.0 - w) * trace[static_cast<std::size_t>(k0)] + w * trace[static_cast<std::size_t>(k1)];
  };
  f.a = lerp(coeffs_.a_trace);
  f.b = lerp(coeffs_.b_trace);
  return f;
}

void LinearErrorSolver::rhs(const Frame& f, const std::vector<double>& eu, const std::vector<double>& ev,
                            std::vector<double>& du, std::vector<double>& dv) const {
  const int n = coeffs_.grid.n;
  const double inv_dx = 1.0 / coeffs_.grid.dx;
  auto slope = [n](const std::vector<double>& e, int i) {
    if (i == 0) return e[1] - e[0];
    if (i == n - 1) return e[static_cast<std::size_t>(n - 1)] - e[static_cast<std::size_t>(n - 2)];
    return 0.5 * (e[static_cast<std::size_t>(i + 1)] - e[static_cast<std::size_t>(i - 1)]);
  };
  // Face values: e_u upwinded from the left, e_v from the right.
  std::vector<double> fu(static_cast<std::size_t>(n + 1)), fv(static_cast<std::size_t>(n + 1));
  for (int i = 0; i < n; ++i) {
    fu[static_cast<std::size_t>(i + 1)] = eu[static_cast<std::size_t>(i)] + 0.5 * slope(eu, i);
    fv[static_cast<std::size_t>(i)] = ev[static_cast<std::size_t>(i)] - 0.5 * slope(ev, i);
  }
  fu[0] = -f.a * fv[0];
  fv[static_cast<std::size_t>(n)] = -f.b * fu[static_cast<std::size_t>(n)];
  du.resize(static_cast<std::size_t>(n));
  dv.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    du[s] = -f.l1[s] * (fu[s + 1] - fu[s]) * inv_dx - (f.g11[s] * eu[s] + f.g12[s] * ev[s]);
    dv[s] = -f.l2[s] * (fv[s + 1] - fv[s]) * inv_dx - (f.g21[s] * eu[s] + f.g22[s] * ev[s]);
  }
}

void LinearErrorSolver::step(std::vector<double>& eu, std::vector<double>& ev, double t, double dt) const {
  const Frame f0 = frame_at(t);
  const Frame f1 = frame_at(t + dt);
  std::vector<double> k1u, k1v, k2u, k2v;
  rhs(f0, eu, ev, k1u, k1v);
  std::vector<double> pu(eu), pv(ev);
  for (std::size_t i = 0; i < eu.size(); ++i) {
    pu[i] += dt * k1u[i];
    pv[i] += dt * k1v[i];
  }
  rhs(f1, pu, pv, k2u, k2v);
  for (std::size_t i = 0; i < eu.size(); ++i) {
    eu[i] += 0.5 * dt * (k1u[i] + k2u[i]);
    ev[i] += 0.5 * dt * (k1v[i] + k2v[i]);
  }
}

}  // namespace stenoflow
