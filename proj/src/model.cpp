#include "stenoflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stenoflow {

std::string_view to_string(FrictionMode mode) {
  return mode == FrictionMode::literal ? "literal" : "kinematic";
}

std::string_view to_string(StenosisLoss loss) {
  return loss == StenosisLoss::young_tsai ? "young_tsai" : "inverse_density";
}

FrictionMode parse_friction_mode(std::string_view text) {
  if (text == "literal") return FrictionMode::literal;
  if (text == "kinematic") return FrictionMode::kinematic;
  throw std::invalid_argument("unknown friction mode '" + std::string(text) + "'");
}

StenosisLoss parse_stenosis_loss(std::string_view text) {
  if (text == "young_tsai") return StenosisLoss::young_tsai;
  if (text == "inverse_density") return StenosisLoss::inverse_density;
  throw std::invalid_argument("unknown stenosis loss '" + std::string(text) + "'");
}

ArteryParams ArteryParams::abdominal_aorta(double stenosis_radius) {
  ArteryParams p;
  p.set_stenosis_radius(stenosis_radius);
  return p;
}

Artery::Artery(const ArteryParams& params) : params_(params) {
  const auto& p = params_;
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument(std::string("artery parameter '") + name + "' must be positive");
  };
  positive(p.length, "length");
  positive(p.r0, "r0");
  positive(p.rho, "rho");
  positive(p.nu, "nu");
  positive(p.wall_thickness, "wall_thickness");
  positive(p.youngs_modulus, "youngs_modulus");
  positive(p.shape_b, "shape_b");
  positive(p.Ks, "Ks");
  positive(p.As, "As");
  // RT = 0 is a free outflow; allowed for limit checks.
  if (!(p.RT >= 0.0) || !std::isfinite(p.RT)) throw std::invalid_argument("artery parameter 'RT' must be non-negative");

  A0_ = p.reference_area();
  // Throat may equal the reference area up to the rounding of pi r^2.
  if (p.As > A0_ * (1.0 + 1e-12))
    throw std::invalid_argument("stenosis area As must not exceed the reference area A0");
  sqrt_A0_ = std::sqrt(A0_);
  beta_ = p.wall_thickness * p.youngs_modulus * std::sqrt(kPi) * p.shape_b;
  Kr_ = p.friction == FrictionMode::literal ? 8.0 * kPi * p.nu : 8.0 * kPi * p.nu / p.rho;
  stenosis_coeff_ = p.stenosis_loss == StenosisLoss::young_tsai ? 0.5 * p.rho * p.Ks : p.Ks / p.rho;
  kappa_ = std::pow(4.0, 4.5) * Kr_ * beta_ * beta_ / (p.rho * p.rho * A0_ * A0_);
  speed_coeff_ = std::sqrt(2.0 * beta_ / (p.rho * A0_));
  area_coeff_ = p.rho * p.rho * A0_ * A0_ / (1024.0 * beta_ * beta_);
}

void Artery::require_positive_area(double A, const char* where) const {
  if (!(A > 0.0)) throw std::domain_error(std::string(where) + ": area must be positive");
}

double Artery::pressure(double A) const {
  require_positive_area(A, "pressure");
  return beta_ / A0_ * (std::sqrt(A) - sqrt_A0_);
}

double Artery::pressure_derivative(double A) const {
  require_positive_area(A, "pressure_derivative");
  return beta_ / (2.0 * A0_ * std::sqrt(A));
}

double Artery::wave_speed(double A) const {
  require_positive_area(A, "wave_speed");
  return 0.5 * speed_coeff_ * std::sqrt(std::sqrt(A));
}

CharSpeeds Artery::char_speeds(StatePoint s) const {
  const double c = wave_speed(s.A);
  return {s.V + c, s.V - c};
}

bool Artery::in_subcritical_domain(StatePoint s) const {
  if (!(s.A > 0.0) || !(s.V > 0.0)) return false;
  return s.V < wave_speed(s.A);
}

bool Artery::is_subcritical(StatePoint s) const {
  if (!(s.A > 0.0) || !std::isfinite(s.V)) return false;
  return std::abs(s.V) < wave_speed(s.A);
}

RiemannPoint Artery::to_riemann(StatePoint s) const {
  const double w = 4.0 * wave_speed(s.A);
  return {s.V + w, s.V - w};
}

StatePoint Artery::from_riemann(RiemannPoint r) const {
  const double d = r.u - r.v;
  if (!(d > 0.0)) throw std::domain_error("from_riemann: requires u > v");
  const double d2 = d * d;
  return {area_coeff_ * d2 * d2, 0.5 * (r.u + r.v)};
}

Conserved Artery::conservative_flux(double A, double Q) const {
  require_positive_area(A, "conservative_flux");
  return {Q, Q * Q / A + beta_ / (3.0 * params_.rho * A0_) * A * std::sqrt(A)};
}

Conserved Artery::friction_source(double A, double Q) const {
  require_positive_area(A, "friction_source");
  return {0.0, Kr_ * Q / A};
}

QuasilinearCoeffs Artery::quasilinear_coeffs(RiemannPoint r) const {
  const double d = r.u - r.v;
  if (d == 0.0) throw std::domain_error("quasilinear_coeffs: u == v");
  const double d2 = d * d;
  return {(5.0 * r.u + 3.0 * r.v) / 8.0, (3.0 * r.u + 5.0 * r.v) / 8.0,
          kappa_ * (r.u + r.v) / (d2 * d2)};
}

double Artery::outlet_residual(StatePoint s) const {
  const double ratio = s.A / params_.As - 1.0;
  return pressure(s.A) - params_.RT * s.A * s.V - s.V * s.V * stenosis_coeff_ * ratio * ratio;
}

double Artery::pressure_drop(StatePoint s) const {
  return pressure(s.A) - params_.RT * s.A * s.V;
}

// G(u,v) = rho D^2 - 32 beta/sqrt(A0) - d1 D^4 S - 8 k S^2 (d2 D^4 - 1)^2
// with D = u - v, S = u + v, d1 = 16 RT c_A, d2 = c_A / As, c_A = area_coeff_.
RelationGradient Artery::outlet_relation(RiemannPoint r) const {
  const double D = r.u - r.v;
  const double S = r.u + r.v;
  const double rho = params_.rho;
  const double d1 = 16.0 * params_.RT * area_coeff_;
  const double d2 = area_coeff_ / params_.As;
  const double k = stenosis_coeff_;
  const double D3 = D * D * D;
  const double D4 = D3 * D;
  const double m = d2 * D4 - 1.0;

  RelationGradient g;
  g.value = rho * D * D - 32.0 * beta_ / sqrt_A0_ - d1 * D4 * S - 8.0 * k * S * S * m * m;
  const double dD = 2.0 * rho * D - 4.0 * d1 * D3 * S - 64.0 * k * S * S * m * d2 * D3;
  const double dS = -d1 * D4 - 16.0 * k * S * m * m;
  g.d_du = dD + dS;
  g.d_dv = -dD + dS;
  return g;
}

RelationGradient Artery::inlet_flow(RiemannPoint r) const {
  const double D = r.u - r.v;
  const double S = r.u + r.v;
  const double D3 = D * D * D;
  const double D4 = D3 * D;
  const double c = 0.5 * area_coeff_;
  return {c * S * D4, c * (D4 + 4.0 * S * D3), c * (D4 - 4.0 * S * D3)};
}

double stenosis_percent(double throat_radius, const ArteryParams& params) {
  if (!(throat_radius > 0.0)) throw std::domain_error("stenosis_percent: radius must be positive");
  if (throat_radius > params.r0 * (1.0 + 1e-12))
    throw std::domain_error("stenosis_percent: throat radius exceeds the reference radius");
  const double A0 = params.reference_area();
  // Radii within rounding of r0 count as no stenosis.
  return std::max(0.0, 100.0 * (A0 - kPi * throat_radius * throat_radius) / A0);
}

}  // namespace stenoflow
