#include <cmath>
#include <vector>

#include "doctest.h"
#include "stenoflow/lyapunov.hpp"
#include "test_support.hpp"

using namespace stenoflow;
using testing_support::rel_err;

namespace {

// Constant coefficients: Lambda = diag(l1, l2), Gamma = -g I, fixed a and b.
LinearCoeffs constant_coeffs(double l1, double l2, double g, double a, double b, int nt = 3, int n = 20) {
  LinearCoeffs c;
  c.grid = Grid::uniform(n, 0.06);
  for (int k = 0; k < nt; ++k) c.times.push_back(0.01 * k);
  c.lambda1 = SpaceTimeField(nt, n, l1);
  c.lambda2 = SpaceTimeField(nt, n, l2);
  c.dlambda1_dx = SpaceTimeField(nt, n, 0.0);
  c.dlambda2_dx = SpaceTimeField(nt, n, 0.0);
  c.gamma11 = SpaceTimeField(nt, n, -g);
  c.gamma12 = SpaceTimeField(nt, n, 0.0);
  c.gamma21 = SpaceTimeField(nt, n, 0.0);
  c.gamma22 = SpaceTimeField(nt, n, -g);
  c.lambda1_in.assign(nt, l1);
  c.lambda2_in.assign(nt, l2);
  c.lambda1_out.assign(nt, l1);
  c.lambda2_out.assign(nt, l2);
  c.a_trace.assign(nt, a);
  c.b_trace.assign(nt, b);
  c.b_degenerate.assign(nt, 0);
  return c;
}

}  // namespace

TEST_CASE("symmetric 2x2 eigenvalues") {
  auto rng = testing_support::make_rng(40);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const Sym2 m{d(rng), d(rng), d(rng)};
    const auto [lo, hi] = eigenvalues(m);
    CHECK(lo <= hi);
    const double scale = std::fabs(m.a11) + std::fabs(m.a22) + std::fabs(m.a12);
    CHECK(std::fabs(lo + hi - (m.a11 + m.a22)) <= 1e-12 * scale);
    CHECK(std::fabs(lo * hi - (m.a11 * m.a22 - m.a12 * m.a12)) <= 1e-12 * scale * scale);
    const bool pd = m.a11 + m.a22 > 0.0 && m.a11 * m.a22 - m.a12 * m.a12 > 0.0;
    CHECK(pd == (lo > 0.0));
  }
}

TEST_CASE("weight matrix") {
  const LyapunovParams lp{1.0, 0.98, 3.0};
  for (double x : {0.0, 0.02, 0.06}) {
    const WeightMatrix w = weight_matrix(x, lp);
    CHECK(rel_err(w.p1 * w.p2, 0.98) < 1e-14);
    CHECK(rel_err(w.dp1, -3.0 * w.p1) < 1e-14);
    CHECK(rel_err(w.dp2, 3.0 * w.p2) < 1e-14);
  }
  CHECK_THROWS_AS((LyapunovParams{0.0, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LyapunovParams{1.0, 1.0, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("feasible mu interval for constant coefficients") {
  const double l1 = 6.0, l2 = -4.0, g = 2.0, b = 0.5, L = 0.06;
  const LinearCoeffs c = constant_coeffs(l1, l2, g, -l2 / l1, b);
  const double p1 = 1.0, p2 = 0.98;
  // R = diag(p1 e^{-mu x}(mu l1 - 2g), p2 e^{mu x}(mu |l2| - 2g)).
  const double mu_lo = 2.0 * g / std::min(l1, -l2);
  const double mu_hi = std::log(p1 * l1 / (p2 * -l2 * b * b)) / (2.0 * L);
  REQUIRE(mu_lo < mu_hi);
  for (double mu : default_mu_grid(60, 0.01, 50.0)) {
    if (std::fabs(mu - mu_lo) < 1e-3 || std::fabs(mu - mu_hi) < 1e-3) continue;
    const ConditionReport r = check_conditions(c, {p1, p2, mu});
    CHECK(r.r_ok == (mu > mu_lo));
    CHECK(r.outlet_ok == (mu < mu_hi));
    CHECK(r.inlet_ok);
    CHECK(r.min_inlet_margin() == doctest::Approx(p2 / p1 - 4.0 / 6.0));
    CHECK(r.feasible == (mu > mu_lo && mu < mu_hi));
  }
  const MuSearchResult s = search_mu(c, p1, p2, default_mu_grid());
  CHECK(s.feasible);
  CHECK(s.mu > mu_lo);
  CHECK(s.mu < mu_hi);

  // Inlet margin fails when p2/p1 is below |l2|/l1.
  const MuSearchResult low = search_mu(c, 1.0, 0.5, default_mu_grid());
  CHECK_FALSE(low.feasible);
  CHECK(low.inlet_margin < 0.0);
}

TEST_CASE("margins are invariant under weight scaling and speed scaling") {
  const LinearCoeffs c = constant_coeffs(6.0, -4.0, 2.0, 4.0 / 6.0, 0.5);
  const LinearCoeffs c2 = constant_coeffs(12.0, -8.0, 2.0, 4.0 / 6.0, 0.5);
  const ConditionReport r1 = check_conditions(c, {1.0, 0.98, 2.0});
  const ConditionReport r3 = check_conditions(c, {3.0, 2.94, 2.0});
  const ConditionReport rd = check_conditions(c2, {1.0, 0.98, 2.0});
  for (std::size_t k = 0; k < r1.times.size(); ++k) {
    CHECK(r1.inlet_margin[k] == doctest::Approx(r3.inlet_margin[k]).epsilon(1e-14));
    CHECK(r1.outlet_margin[k] == doctest::Approx(r3.outlet_margin[k]).epsilon(1e-14));
    CHECK(r1.inlet_margin[k] == doctest::Approx(rd.inlet_margin[k]).epsilon(1e-14));
    CHECK(r3.min_eig_r[k] == doctest::Approx(3.0 * r1.min_eig_r[k]).epsilon(1e-12));
  }
  CHECK(r1.feasible == r3.feasible);
  const auto d1 = decay_rate_estimate(r1), d3 = decay_rate_estimate(r3);
  CHECK(d1.has_value() == d3.has_value());
  if (d1 && d3) CHECK(*d1 == doctest::Approx(*d3).epsilon(1e-12));
}

TEST_CASE("boundary terms have the stabilizing sign when the margins hold") {
  const LinearCoeffs c = constant_coeffs(6.0, -4.0, 0.5, 4.0 / 6.0, 0.5);
  const ConditionReport r = check_conditions(c, {1.0, 0.98, 1.0});
  REQUIRE(r.feasible);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    CHECK(r.inlet_boundary_term[k] <= 0.0);
    CHECK(r.outlet_boundary_term[k] >= 0.0);
  }
}

TEST_CASE("R - delta P is positive semidefinite at the decay estimate") {
  LinearCoeffs c = constant_coeffs(6.0, -4.0, 0.5, 4.0 / 6.0, 0.5);
  auto rng = testing_support::make_rng(41);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (int k = 0; k < c.samples(); ++k)
    for (int i = 0; i < c.grid.n; ++i) {
      c.gamma12(k, i) = jitter(rng);
      c.gamma21(k, i) = jitter(rng);
      c.gamma11(k, i) += jitter(rng);
    }
  const LyapunovParams lp{1.0, 0.98, 1.0};
  const ConditionReport r = check_conditions(c, lp);
  REQUIRE(r.feasible);
  const auto delta = decay_rate_estimate(r);
  REQUIRE(delta.has_value());
  CHECK(*delta > 0.0);
  for (int k = 0; k < c.samples(); ++k)
    for (int i = 0; i < c.grid.n; ++i) {
      Sym2 m = r_matrix(k, i, c, lp);
      const WeightMatrix w = weight_matrix(c.grid.center(i), lp);
      m.a11 -= *delta * w.p1;
      m.a22 -= *delta * w.p2;
      CHECK(eigenvalues(m).first >= -1e-12 * r.max_abs_eig_r);
    }
}

TEST_CASE("degenerate outlet samples are excluded") {
  LinearCoeffs c = constant_coeffs(6.0, -4.0, 0.5, 4.0 / 6.0, 0.5);
  c.b_degenerate[1] = 1;
  c.b_trace[1] = 1e9;
  const ConditionReport r = check_conditions(c, {1.0, 0.98, 1.0});
  CHECK(r.degenerate_times.size() == 1);
  CHECK(std::isnan(r.outlet_margin[1]));
  CHECK(r.outlet_ok);
}

TEST_CASE("weight search prefers feasible ratios") {
  const LinearCoeffs c = constant_coeffs(6.0, -4.0, 0.5, 4.0 / 6.0, 0.5);
  const WeightSearchResult w = search_weights(c, {0.5, 0.6, 0.98}, default_mu_grid());
  CHECK(w.best.feasible);
  CHECK(w.p2 > 4.0 / 6.0);
  CHECK_THROWS_AS(search_weights(c, {}, default_mu_grid()), std::invalid_argument);
  CHECK_THROWS_AS(search_mu(c, 1.0, 1.0, {}), std::invalid_argument);
}
