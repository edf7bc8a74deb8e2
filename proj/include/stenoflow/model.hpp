#pragma once

// One-dimensional arterial flow model with a stenosed outlet: physical
// parameters, pressure law, characteristic structure and the Riemann-invariant
// form of the equations and boundary relations.

#include <string>
#include <string_view>

namespace stenoflow {

inline constexpr double kPi = 3.14159265358979323846;

/// How the friction coefficient Kr is derived from the viscosity parameter.
///   literal    Kr = 8*pi*nu (nu taken as given, the clinical-parameter default)
///   kinematic  Kr = 8*pi*nu/rho (nu interpreted as dynamic viscosity)
enum class FrictionMode { literal, kinematic };

/// Coefficient multiplying V^2 (A/As - 1)^2 in the outlet pressure relation.
///   young_tsai       rho*Ks/2, the classical stenosis loss; equals the
///                    4*Ks*rho prefactor of the Riemann-space outlet relation
///   inverse_density  Ks/rho, as written in the physical-variable relation
enum class StenosisLoss { young_tsai, inverse_density };

std::string_view to_string(FrictionMode mode);
std::string_view to_string(StenosisLoss loss);
FrictionMode parse_friction_mode(std::string_view text);
StenosisLoss parse_stenosis_loss(std::string_view text);

/// Primary (user-facing) artery inputs in SI units. Derived quantities such as
/// A0, beta and Kr live on Artery and are always recomputed from these.
struct ArteryParams {
  double length = 0.06;            // m
  double r0 = 0.0055;              // m
  double rho = 1060.0;             // kg/m^3
  double nu = 0.0035;              // Pa s
  double wall_thickness = 0.0005;  // m
  double youngs_modulus = 4.0e5;   // N/m^2
  double shape_b = 4.0 / 3.0;
  double Ks = 1.52;
  double As = kPi * 0.0055 * 0.0055;  // m^2, no stenosis
  double RT = 1.33e8;                 // N s m^-5
  FrictionMode friction = FrictionMode::literal;
  StenosisLoss stenosis_loss = StenosisLoss::young_tsai;

  /// Abdominal-aorta segment used throughout, with the outlet throat radius
  /// set to `stenosis_radius` (m).
  static ArteryParams abdominal_aorta(double stenosis_radius = 0.0055);

  double reference_area() const { return kPi * r0 * r0; }
  void set_stenosis_radius(double radius) { As = kPi * radius * radius; }
};

struct StatePoint {
  double A = 0.0;  // m^2
  double V = 0.0;  // m/s
  double Q() const { return A * V; }
};

struct RiemannPoint {
  double u = 0.0;  // forward invariant
  double v = 0.0;  // backward invariant
};

struct CharSpeeds {
  double forward = 0.0;   // lambda1 = V + c
  double backward = 0.0;  // lambda2 = V - c
};

/// Pair of conservative components (A, Q). Also used for fluxes and sources,
/// where the members hold the mass and momentum components.
struct Conserved {
  double A = 0.0;
  double Q = 0.0;

  Conserved& operator+=(const Conserved& o) { A += o.A; Q += o.Q; return *this; }
  Conserved& operator-=(const Conserved& o) { A -= o.A; Q -= o.Q; return *this; }
  friend Conserved operator+(Conserved a, const Conserved& b) { return a += b; }
  friend Conserved operator-(Conserved a, const Conserved& b) { return a -= b; }
  friend Conserved operator*(double s, const Conserved& c) { return {s * c.A, s * c.Q}; }
  friend bool operator==(const Conserved&, const Conserved&) = default;
};

/// Diagonal transport matrix and friction term of the quasilinear system in
/// Riemann coordinates: Y_t + diag(lambda1, lambda2) Y_x + (f1, f1) = 0.
struct QuasilinearCoeffs {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double f1 = 0.0;
};

/// Value and gradient of a scalar boundary relation in Riemann coordinates.
struct RelationGradient {
  double value = 0.0;
  double d_du = 0.0;
  double d_dv = 0.0;
};

/// Validated artery model. Cheap to copy; every method is a pure function.
class Artery {
 public:
  explicit Artery(const ArteryParams& params);

  const ArteryParams& params() const { return params_; }
  double length() const { return params_.length; }
  double rho() const { return params_.rho; }
  double A0() const { return A0_; }
  double sqrt_A0() const { return sqrt_A0_; }
  double beta() const { return beta_; }
  double Kr() const { return Kr_; }
  double As() const { return params_.As; }
  double RT() const { return params_.RT; }
  /// Coefficient of V^2 (A/As - 1)^2 in the outlet relation (depends on mode).
  double stenosis_coefficient() const { return stenosis_coeff_; }
  /// Friction constant of the Riemann-coordinate source, 4^(9/2) Kr beta^2 / (rho A0)^2.
  double kappa() const { return kappa_; }

  /// Transmural pressure (beta/A0)(sqrt(A) - sqrt(A0)).
  double pressure(double A) const;
  double pressure_derivative(double A) const;
  /// c(A) = 1/2 sqrt(2 beta/(rho A0)) A^(1/4).
  double wave_speed(double A) const;
  /// c at the reference area.
  double rest_wave_speed() const { return wave_speed(A0_); }

  CharSpeeds char_speeds(StatePoint s) const;
  /// Subcritical forward-flow domain: A > 0, 0 < V < c(A).
  bool in_subcritical_domain(StatePoint s) const;
  /// Weaker check used for rest states: A > 0 and |V| < c(A).
  bool is_subcritical(StatePoint s) const;

  RiemannPoint to_riemann(StatePoint s) const;
  StatePoint from_riemann(RiemannPoint r) const;

  Conserved conservative_flux(double A, double Q) const;
  Conserved conservative_flux(const Conserved& U) const { return conservative_flux(U.A, U.Q); }
  Conserved friction_source(double A, double Q) const;

  QuasilinearCoeffs quasilinear_coeffs(RiemannPoint r) const;

  /// Left side of the outlet relation in physical variables (Pa); zero on
  /// admissible boundary states.
  double outlet_residual(StatePoint s) const;
  /// Pressure drop across the stenosis, P(A) - RT*A*V.
  double pressure_drop(StatePoint s) const;

  /// Outlet relation expressed in Riemann coordinates (32x the physical
  /// residual) with analytic partial derivatives.
  RelationGradient outlet_relation(RiemannPoint r) const;
  /// Inlet flow A*V written in Riemann coordinates, with analytic partials.
  RelationGradient inlet_flow(RiemannPoint r) const;

 private:
  void require_positive_area(double A, const char* where) const;

  ArteryParams params_;
  double A0_ = 0.0;
  double sqrt_A0_ = 0.0;
  double beta_ = 0.0;
  double Kr_ = 0.0;
  double stenosis_coeff_ = 0.0;
  double kappa_ = 0.0;
  double speed_coeff_ = 0.0;  // sqrt(2 beta / (rho A0))
  double area_coeff_ = 0.0;   // rho^2 A0^2 / (4^5 beta^2)
};

/// 100 (A0 - pi r^2) / A0 for an outlet throat radius r (m).
double stenosis_percent(double throat_radius, const ArteryParams& params);

}  // namespace stenoflow
