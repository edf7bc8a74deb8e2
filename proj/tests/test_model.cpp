#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "stenoflow/model.hpp"
#include "test_support.hpp"

using namespace stenoflow;
using testing_support::rel_err;

namespace {

// Hand-computed abdominal aorta constants.
const double kPiRef = std::acos(-1.0);
const double kBeta = 0.0005 * 4e5 * std::sqrt(kPiRef) * (4.0 / 3.0);
const double kA0 = kPiRef * 0.0055 * 0.0055;
const double kRho = 1060.0;
const double kC0 = 0.5 * std::sqrt(2.0 * kBeta / (kRho * kA0)) * std::pow(kA0, 0.25);

Artery aorta(double throat = 0.0055, FrictionMode mode = FrictionMode::literal) {
  ArteryParams p = ArteryParams::abdominal_aorta(throat);
  p.friction = mode;
  return Artery(p);
}

}  // namespace

TEST_CASE("derived constants") {
  const Artery a = aorta();
  CHECK(rel_err(a.beta(), kBeta) < 1e-12);
  CHECK(a.beta() == doctest::Approx(472.65).epsilon(1e-4));
  CHECK(rel_err(a.A0(), kA0) < 1e-12);
  CHECK(a.A0() == doctest::Approx(9.5033e-5).epsilon(1e-4));
  CHECK(rel_err(a.Kr(), 8.0 * kPiRef * 0.0035) < 1e-12);
  CHECK(rel_err(aorta(0.0055, FrictionMode::kinematic).Kr(), 8.0 * kPiRef * 0.0035 / kRho) < 1e-12);
  const double kappa = std::pow(4.0, 4.5) * a.Kr() * kBeta * kBeta / (kRho * kRho * kA0 * kA0);
  CHECK(rel_err(a.kappa(), kappa) < 1e-12);
}

TEST_CASE("invalid parameters are rejected") {
  ArteryParams p = ArteryParams::abdominal_aorta();
  p.rho = 0.0;
  CHECK_THROWS_AS(Artery{p}, std::invalid_argument);
  p = ArteryParams::abdominal_aorta();
  p.As = 2.0 * p.reference_area();
  CHECK_THROWS_AS(Artery{p}, std::invalid_argument);
  p = ArteryParams::abdominal_aorta();
  p.As = 0.0;
  CHECK_THROWS_AS(Artery{p}, std::invalid_argument);
  p = ArteryParams::abdominal_aorta();
  p.RT = -1.0;
  CHECK_THROWS_AS(Artery{p}, std::invalid_argument);
}

TEST_CASE("pressure law") {
  const Artery a = aorta();
  CHECK(a.pressure(kA0) == doctest::Approx(0.0));
  CHECK(rel_err(a.pressure(4.0 * kA0), kBeta / std::sqrt(kA0)) < 1e-12);
  CHECK(a.pressure(4.0 * kA0) == doctest::Approx(4.849e4).epsilon(1e-3));
  CHECK(rel_err(a.pressure(0.25 * kA0), -kBeta / (2.0 * std::sqrt(kA0))) < 1e-12);
  CHECK_THROWS_AS(a.pressure(0.0), std::domain_error);
  CHECK_THROWS_AS(a.pressure(-1e-6), std::domain_error);

  double prev = a.pressure(0.01 * kA0);
  for (int i = 2; i <= 1000; ++i) {
    const double p = a.pressure(0.01 * i * kA0);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("characteristic speeds") {
  const Artery a = aorta();
  const CharSpeeds rest = a.char_speeds({kA0, 0.0});
  CHECK(rel_err(rest.forward, kC0) < 1e-12);
  CHECK(rest.forward == doctest::Approx(4.783).epsilon(1e-3));
  CHECK(rest.backward == doctest::Approx(-rest.forward));
  CHECK(rel_err(a.rest_wave_speed(), kC0) < 1e-12);

  auto rng = testing_support::make_rng(1);
  for (int i = 0; i < 200; ++i) {
    const StatePoint s = testing_support::random_omega_state(a, rng);
    const CharSpeeds cs = a.char_speeds(s);
    CHECK(cs.forward * cs.backward < 0.0);
  }
  CHECK_THROWS_AS(a.char_speeds({0.0, 1.0}), std::domain_error);
}

TEST_CASE("subcritical domain membership") {
  const Artery a = aorta();
  const double c = a.wave_speed(kA0);
  CHECK(a.in_subcritical_domain({kA0, 0.5 * c}));
  CHECK_FALSE(a.in_subcritical_domain({kA0, 2.0 * c}));
  CHECK_FALSE(a.in_subcritical_domain({kA0, 0.0}));
  CHECK_FALSE(a.in_subcritical_domain({-kA0, 0.1}));
  CHECK(a.is_subcritical({kA0, 0.0}));
}

TEST_CASE("Riemann coordinates") {
  const Artery a = aorta();
  const RiemannPoint rest = a.to_riemann({kA0, 0.0});
  CHECK(rel_err(rest.u, 4.0 * kC0) < 1e-12);
  CHECK(rel_err(rest.v, -4.0 * kC0) < 1e-12);
  CHECK(rest.u == doctest::Approx(19.13).epsilon(1e-3));

  const StatePoint back = a.from_riemann({4.0 * kC0, -4.0 * kC0});
  CHECK(rel_err(back.A, kA0) < 1e-12);
  CHECK(std::fabs(back.V) < 1e-14);

  const StatePoint s1 = a.from_riemann({5.0, -3.0});
  const StatePoint s2 = a.from_riemann({9.0, -7.0});  // u - v doubled, same u + v
  CHECK(rel_err(s2.A, 16.0 * s1.A) < 1e-12);
  CHECK(s1.V == s2.V);

  CHECK_THROWS_AS(a.from_riemann({1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(a.from_riemann({1.0, 2.0}), std::domain_error);
  CHECK_THROWS_AS(a.to_riemann({0.0, 0.0}), std::domain_error);

  auto rng = testing_support::make_rng(2);
  for (int i = 0; i < 1000; ++i) {
    const StatePoint s = testing_support::random_omega_state(a, rng);
    const RiemannPoint r = a.to_riemann(s);
    CHECK(0.5 * (r.u + r.v) == doctest::Approx(s.V).epsilon(1e-14));
    CHECK(r.u > 0.0);
    CHECK(r.v < 0.0);
    const StatePoint t = a.from_riemann(r);
    CHECK(rel_err(t.A, s.A) < 1e-12);
    CHECK(rel_err(t.V, s.V) < 1e-12);
    const RiemannPoint r2 = a.to_riemann(t);
    CHECK(rel_err(r2.u, r.u) < 1e-12);
    CHECK(rel_err(r2.v, r.v) < 1e-12);
  }
}

TEST_CASE("conservative flux and friction source") {
  const Artery a = aorta();
  const Conserved rest = a.conservative_flux(kA0, 0.0);
  CHECK(rest.A == 0.0);
  CHECK(rel_err(rest.Q, kBeta * std::sqrt(kA0) / (3.0 * kRho)) < 1e-12);
  CHECK(rest.Q == doctest::Approx(1.4493e-3).epsilon(1e-3));
  CHECK(a.conservative_flux(kA0, 2.5e-5).A == 2.5e-5);

  for (double f : {0.5, 1.0, 2.0}) {
    const double A = f * kA0;
    const double h = 1e-6 * A;
    const double dF2 = (a.conservative_flux(A + h, 0.0).Q - a.conservative_flux(A - h, 0.0).Q) / (2.0 * h);
    const double c = a.wave_speed(A);
    CHECK(rel_err(dF2, c * c) < 1e-8);
  }
  CHECK_THROWS_AS(a.conservative_flux(0.0, 1.0), std::domain_error);

  CHECK(a.friction_source(kA0, 0.0).A == 0.0);
  CHECK(a.friction_source(kA0, 0.0).Q == 0.0);
  const Conserved s1 = a.friction_source(kA0, 1e-5);
  CHECK(s1.A == 0.0);
  CHECK(rel_err(s1.Q, 8.0 * kPiRef * 0.0035 * 1e-5 / kA0) < 1e-12);
  CHECK(rel_err(a.friction_source(kA0, 2e-5).Q, 2.0 * s1.Q) < 1e-14);
  const Artery k = aorta(0.0055, FrictionMode::kinematic);
  CHECK(rel_err(k.friction_source(kA0, 1e-5).Q, 8.0 * kPiRef * 0.0035 / kRho * 1e-5 / kA0) < 1e-12);
}

TEST_CASE("quasilinear coefficients") {
  for (FrictionMode mode : {FrictionMode::literal, FrictionMode::kinematic}) {
    const Artery a = aorta(0.0055, mode);
    auto rng = testing_support::make_rng(3);
    for (int i = 0; i < 1000; ++i) {
      const StatePoint s = testing_support::random_omega_state(a, rng);
      const QuasilinearCoeffs q = a.quasilinear_coeffs(a.to_riemann(s));
      const CharSpeeds cs = a.char_speeds(s);
      CHECK(rel_err(q.lambda1, cs.forward) < 1e-12);
      CHECK(rel_err(q.lambda2, cs.backward) < 1e-12);
      CHECK(rel_err(q.f1, a.Kr() * s.V / s.A) < 1e-10);
    }
    CHECK(a.quasilinear_coeffs({7.0, -7.0}).f1 == 0.0);
    CHECK_THROWS_AS(a.quasilinear_coeffs({3.0, 3.0}), std::domain_error);
  }
}

TEST_CASE("outlet relation in physical variables") {
  const Artery healthy = aorta();
  CHECK(healthy.outlet_residual({kA0, 0.0}) == doctest::Approx(0.0));
  CHECK(rel_err(healthy.outlet_residual({1.3 * kA0, 0.0}), healthy.pressure(1.3 * kA0)) < 1e-14);
  CHECK(healthy.pressure_drop({kA0, 0.0}) == doctest::Approx(0.0));
  CHECK(rel_err(healthy.pressure_drop({kA0, 0.3}), -1.33e8 * kA0 * 0.3) < 1e-12);

  // Bisection oracle for the root in A at fixed V with a narrowed outlet.
  const Artery sten = aorta(0.0022);
  const double V = 0.2;
  double lo = 0.5 * kA0, hi = 3.0 * kA0;
  REQUIRE(sten.outlet_residual({lo, V}) < 0.0);
  REQUIRE(sten.outlet_residual({hi, V}) > 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sten.outlet_residual({mid, V}) < 0.0 ? lo : hi) = mid;
  }
  CHECK(std::fabs(sten.outlet_residual({0.5 * (lo + hi), V})) < 1e-10);
}

TEST_CASE("stenosis loss coefficient modes") {
  ArteryParams p = ArteryParams::abdominal_aorta(0.0022);
  const Artery yt(p);
  CHECK(rel_err(yt.stenosis_coefficient(), 0.5 * kRho * 1.52) < 1e-14);
  p.stenosis_loss = StenosisLoss::inverse_density;
  const Artery inv(p);
  CHECK(rel_err(inv.stenosis_coefficient(), 1.52 / kRho) < 1e-14);

  const StatePoint s{1.1 * kA0, 0.35};
  const double ratio = s.A / p.As - 1.0;
  CHECK(rel_err(yt.pressure_drop(s) - yt.outlet_residual(s), 0.5 * kRho * 1.52 * s.V * s.V * ratio * ratio) < 1e-10);
  CHECK(parse_stenosis_loss(to_string(StenosisLoss::inverse_density)) == StenosisLoss::inverse_density);
  CHECK(parse_friction_mode("kinematic") == FrictionMode::kinematic);
  CHECK_THROWS(parse_friction_mode("bogus"));
}

TEST_CASE("outlet relation in Riemann coordinates") {
  for (double throat : {0.0055, 0.003, 0.0015}) {
    for (StenosisLoss loss : {StenosisLoss::young_tsai, StenosisLoss::inverse_density}) {
      ArteryParams p = ArteryParams::abdominal_aorta(throat);
      p.stenosis_loss = loss;
      const Artery a(p);
      auto rng = testing_support::make_rng(4);
      for (int i = 0; i < 100; ++i) {
        const StatePoint s = testing_support::random_omega_state(a, rng);
        const RiemannPoint r = a.to_riemann(s);
        const RelationGradient g = a.outlet_relation(r);
        CHECK(rel_err(g.value, 32.0 * a.outlet_residual(s)) < 1e-9);
        const double hu = 1e-6 * std::fabs(r.u);
        const double hv = 1e-6 * std::fabs(r.v);
        const double du = (a.outlet_relation({r.u + hu, r.v}).value - a.outlet_relation({r.u - hu, r.v}).value) / (2 * hu);
        const double dv = (a.outlet_relation({r.u, r.v + hv}).value - a.outlet_relation({r.u, r.v - hv}).value) / (2 * hv);
        CHECK(rel_err(g.d_du, du) < 1e-6);
        CHECK(rel_err(g.d_dv, dv) < 1e-6);
      }
    }
  }
}

TEST_CASE("Riemann outlet relation matches the symbolic form") {
  // G = rho D^2 - 32 beta/sqrt(A0) - d1 D^4 S - 4 Ks rho S^2 (d2 D^4 - 1)^2
  const Artery a = aorta(0.0017);
  const double d1 = 1.33e8 * kRho * kRho * kA0 * kA0 / (std::pow(4.0, 3) * kBeta * kBeta);
  const double d2 = kRho * kRho * kA0 * kA0 / (std::pow(4.0, 5) * kBeta * kBeta * a.As());
  auto rng = testing_support::make_rng(5);
  for (int i = 0; i < 100; ++i) {
    const RiemannPoint r = a.to_riemann(testing_support::random_omega_state(a, rng));
    const double D = r.u - r.v, S = r.u + r.v;
    const double t = d2 * std::pow(D, 4) - 1.0;
    const double G = kRho * D * D - 32.0 * kBeta / std::sqrt(kA0) - d1 * std::pow(D, 4) * S - 4.0 * 1.52 * kRho * S * S * t * t;
    CHECK(std::fabs(a.outlet_relation(r).value - G) < 1e-9 * 32.0 * kBeta / std::sqrt(kA0));
  }
}

TEST_CASE("zero-speed healthy outlet gives b = -1") {
  ArteryParams p = ArteryParams::abdominal_aorta();
  p.RT = 0.0;
  const Artery a(p);
  const RiemannPoint r = a.to_riemann({kA0, 0.0});
  const RelationGradient g = a.outlet_relation(r);
  CHECK(std::fabs(g.value) < 1e-9 * kBeta / std::sqrt(kA0));
  CHECK(g.d_du / g.d_dv == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("inlet flow relation") {
  const Artery a = aorta();
  auto rng = testing_support::make_rng(6);
  for (int i = 0; i < 100; ++i) {
    const StatePoint s = testing_support::random_omega_state(a, rng);
    const RiemannPoint r = a.to_riemann(s);
    const RelationGradient g = a.inlet_flow(r);
    CHECK(rel_err(g.value, s.Q()) < 1e-12);
    const double h = 1e-6 * std::fabs(r.u);
    CHECK(rel_err(g.d_du, (a.inlet_flow({r.u + h, r.v}).value - a.inlet_flow({r.u - h, r.v}).value) / (2 * h)) < 1e-6);
    CHECK(rel_err(g.d_dv, (a.inlet_flow({r.u, r.v + h}).value - a.inlet_flow({r.u, r.v - h}).value) / (2 * h)) < 1e-6);
    CHECK(g.d_du > 0.0);
  }
}

TEST_CASE("stenosis percent") {
  const ArteryParams p = ArteryParams::abdominal_aorta();
  CHECK(stenosis_percent(0.0055, p) == doctest::Approx(0.0));
  CHECK(stenosis_percent(0.55 / 100.0, p) == 0.0);
  CHECK(std::fabs(stenosis_percent(0.004, p) - 47.11) <= 0.01);
  CHECK(std::fabs(stenosis_percent(0.003, p) - 70.25) <= 0.01);
  CHECK(std::fabs(stenosis_percent(0.0022, p) - 84.0) <= 0.01);
  CHECK(std::fabs(stenosis_percent(0.0015, p) - 92.56) <= 0.01);
  CHECK(stenosis_percent(0.0017, p) == doctest::Approx(100.0 * (1.0 - (0.17 / 0.55) * (0.17 / 0.55))));
  CHECK_THROWS_AS(stenosis_percent(0.006, p), std::domain_error);
  CHECK_THROWS_AS(stenosis_percent(0.0, p), std::domain_error);
}
