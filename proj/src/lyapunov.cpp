#include "stenoflow/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stenoflow {

void LyapunovParams::validate() const {
  if (!(p1 > 0.0) || !(p2 > 0.0)) throw std::invalid_argument("Lyapunov weights p1, p2 must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("Lyapunov rate mu must be positive");
}

WeightMatrix weight_matrix(double x, const LyapunovParams& lp) {
  const double em = std::exp(-lp.mu * x);
  const double ep = std::exp(lp.mu * x);
  return {lp.p1 * em, lp.p2 * ep, -lp.mu * lp.p1 * em, lp.mu * lp.p2 * ep};
}

std::pair<double, double> eigenvalues(const Sym2& m) {
  const double mean = 0.5 * (m.a11 + m.a22);
  const double half_diff = 0.5 * (m.a11 - m.a22);
  const double radius = std::hypot(half_diff, m.a12);
  return {mean - radius, mean + radius};
}

Sym2 r_matrix(int k, int i, const LinearCoeffs& c, const LyapunovParams& lp) {
  const WeightMatrix w = weight_matrix(c.grid.center(i), lp);
  const double g11 = c.gamma11(k, i), g12 = c.gamma12(k, i);
  const double g21 = c.gamma21(k, i), g22 = c.gamma22(k, i);
  Sym2 r;
  r.a11 = 2.0 * w.p1 * g11 - w.dp1 * c.lambda1(k, i) - w.p1 * c.dlambda1_dx(k, i);
  r.a22 = 2.0 * w.p2 * g22 - w.dp2 * c.lambda2(k, i) - w.p2 * c.dlambda2_dx(k, i);
  // (P Gamma + Gamma^T P) is symmetric; the Lambda terms are diagonal.
  r.a12 = w.p1 * g12 + w.p2 * g21;
  return r;
}

double ConditionReport::min_inlet_margin() const {
  return inlet_margin.empty() ? 0.0 : *std::min_element(inlet_margin.begin(), inlet_margin.end());
}

double ConditionReport::min_outlet_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < outlet_margin.size(); ++k)
    if (std::isfinite(outlet_margin[k])) m = std::min(m, outlet_margin[k]);
  return std::isfinite(m) ? m : 0.0;
}

ConditionReport check_conditions(const LinearCoeffs& c, const LyapunovParams& lp) {
  lp.validate();
  const int nt = c.samples();
  const int n = c.grid.n;
  const double L = c.grid.length;
  if (nt < 1) throw std::invalid_argument("check_conditions: empty coefficient set");

  ConditionReport rep;
  rep.params = lp;
  rep.times = c.times;
  rep.lambda_min_r = SpaceTimeField(nt, n);
  rep.M = std::max(lp.p1, lp.p2 * std::exp(lp.mu * L));
  rep.m = std::min(lp.p1 * std::exp(-lp.mu * L), lp.p2);
  rep.global_min_eig_r = std::numeric_limits<double>::infinity();
  rep.inlet_ok = rep.outlet_ok = rep.r_ok = true;

  const double e2 = std::exp(2.0 * lp.mu * L);
  const WeightMatrix wl = weight_matrix(L, lp);
  for (int k = 0; k < nt; ++k) {
    const double t = c.times[static_cast<std::size_t>(k)];
    const double l1_in = c.lambda1_in[static_cast<std::size_t>(k)];
    const double l2_in = c.lambda2_in[static_cast<std::size_t>(k)];
    const double l1_out = c.lambda1_out[static_cast<std::size_t>(k)];
    const double l2_out = c.lambda2_out[static_cast<std::size_t>(k)];
    const double a = c.a_trace[static_cast<std::size_t>(k)];
    const double b = c.b_trace[static_cast<std::size_t>(k)];

    const double m26 = lp.p2 / lp.p1 - std::fabs(l2_in) / l1_in;
    rep.inlet_margin.push_back(m26);
    rep.inlet_boundary_term.push_back(lp.p1 * l1_in * a * a + lp.p2 * l2_in);
    if (m26 < 0.0 && rep.inlet_ok) {
      rep.inlet_ok = false;
      rep.first_inlet_violation = t;
    }

    if (c.b_degenerate[static_cast<std::size_t>(k)]) {
      rep.degenerate_times.push_back(t);
      rep.outlet_margin.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.outlet_boundary_term.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      const double m27 = 1.0 - e2 * lp.p2 * std::fabs(l2_out) * b * b / (lp.p1 * l1_out);
      rep.outlet_margin.push_back(m27);
      rep.outlet_boundary_term.push_back(wl.p1 * l1_out + wl.p2 * l2_out * b * b);
      if (m27 < 0.0 && rep.outlet_ok) {
        rep.outlet_ok = false;
        rep.first_outlet_violation = t;
      }
    }

    double row_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const auto [lo, hi] = eigenvalues(r_matrix(k, i, c, lp));
      rep.lambda_min_r(k, i) = lo;
      row_min = std::min(row_min, lo);
      rep.max_abs_eig_r = std::max({rep.max_abs_eig_r, std::fabs(lo), std::fabs(hi)});
    }
    rep.min_eig_r.push_back(row_min);
    rep.global_min_eig_r = std::min(rep.global_min_eig_r, row_min);
    if (!(row_min > 0.0) && rep.r_ok) {
      rep.r_ok = false;
      rep.first_r_violation = t;
    }
  }
  rep.feasible = rep.inlet_ok && rep.outlet_ok && rep.r_ok;
  return rep;
}

std::optional<double> decay_rate_estimate(const ConditionReport& report) {
  if (!report.feasible) return std::nullopt;
  return report.global_min_eig_r / report.M;
}

std::vector<double> default_mu_grid(int count, double lo, double hi) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("invalid mu grid");
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.push_back(lo * std::pow(hi / lo, s));
  }
  return grid;
}

MuSearchResult search_mu(const LinearCoeffs& coeffs, double p1, double p2, const std::vector<double>& mu_grid) {
  if (mu_grid.empty()) throw std::invalid_argument("search_mu: empty mu grid");
  MuSearchResult best;
  bool have = false;
  for (double mu : mu_grid) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("search_mu: mu values must be positive");
    ConditionReport rep = check_conditions(coeffs, {p1, p2, mu});
    MuSearchResult cand;
    cand.mu = mu;
    cand.inlet_margin = rep.min_inlet_margin();
    cand.outlet_margin = rep.min_outlet_margin();
    cand.r_margin = rep.max_abs_eig_r > 0.0 ? rep.global_min_eig_r / rep.max_abs_eig_r : 0.0;
    cand.score = std::min({cand.inlet_margin, cand.outlet_margin, cand.r_margin});
    cand.feasible = rep.feasible;
    // Strict improvement only: the first (smallest) mu wins ties.
    if (!have || cand.score > best.score) {
      cand.report = std::move(rep);
      best = std::move(cand);
      have = true;
    }
  }
  return best;
}

WeightSearchResult search_weights(const LinearCoeffs& coeffs, const std::vector<double>& p2_grid,
                                  const std::vector<double>& mu_grid) {
  if (p2_grid.empty()) throw std::invalid_argument("search_weights: empty p2 grid");
  WeightSearchResult best;
  bool have = false;
  for (double p2 : p2_grid) {
    MuSearchResult r = search_mu(coeffs, 1.0, p2, mu_grid);
    if (!have || (r.feasible && !best.best.feasible) ||
        (r.feasible == best.best.feasible && r.score > best.best.score)) {
      best.p1 = 1.0;
      best.p2 = p2;
      best.best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace stenoflow
