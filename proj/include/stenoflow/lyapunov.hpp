#pragma once

// Numerical check of the sufficient conditions for exponential L2 stability
// of the linear error system, using the weighted quadratic functional
//   V(z) = int_0^L z^T P(x) z dx,  P(x) = diag(p1 e^{-mu x}, p2 e^{mu x}).

#include <optional>
#include <vector>

#include "stenoflow/linearize.hpp"

namespace stenoflow {

struct LyapunovParams {
  double p1 = 1.0;
  double p2 = 0.98;
  double mu = 1.0;  // 1/m

  void validate() const;
};

struct WeightMatrix {
  double p1 = 0.0, p2 = 0.0;    // diagonal of P(x)
  double dp1 = 0.0, dp2 = 0.0;  // diagonal of dP/dx
};

WeightMatrix weight_matrix(double x, const LyapunovParams& lp);

struct Sym2 {
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;
};

/// Closed-form eigenvalues of a symmetric 2x2 matrix, {min, max}.
std::pair<double, double> eigenvalues(const Sym2& m);

/// R = P Gamma + Gamma^T P - P' Lambda - P dLambda/dx at cell i, sample k,
/// symmetrized.
Sym2 r_matrix(int k, int i, const LinearCoeffs& coeffs, const LyapunovParams& lp);

struct ConditionReport {
  LyapunovParams params;
  std::vector<double> times;
  std::vector<double> inlet_margin;    // p2/p1 - |Lambda2(0,t)|/Lambda1(0,t)
  std::vector<double> outlet_margin;   // 1 - e^{2 mu L} p2|Lambda2(L,t)| b^2 / (p1 Lambda1(L,t))
  std::vector<double> min_eig_r;       // min over x of lambda_min(R(x,t))
  SpaceTimeField lambda_min_r;         // lambda_min(R) on the (t, cell) grid
  std::vector<double> inlet_boundary_term;   // p1 Lambda1(0) a^2 + p2 Lambda2(0)        (<= 0 wanted)
  std::vector<double> outlet_boundary_term;  // P1(L) Lambda1(L) + P2(L) Lambda2(L) b^2   (>= 0 wanted)
  std::vector<double> degenerate_times;      // samples excluded because b was degenerate
  double global_min_eig_r = 0.0;
  double max_abs_eig_r = 0.0;  // normalisation scale for the R margin
  double M = 0.0;              // max over x of lambda_max(P(x))
  double m = 0.0;              // min over x of lambda_min(P(x))
  bool inlet_ok = false, outlet_ok = false, r_ok = false;
  bool feasible = false;
  std::optional<double> first_inlet_violation, first_outlet_violation, first_r_violation;

  double min_inlet_margin() const;
  double min_outlet_margin() const;
};

ConditionReport check_conditions(const LinearCoeffs& coeffs, const LyapunovParams& lp);

/// min lambda_min(R) / M when the report is feasible; nullopt otherwise.
std::optional<double> decay_rate_estimate(const ConditionReport& report);

/// 40 log-spaced values in [1e-3, 50] 1/m.
std::vector<double> default_mu_grid(int count = 40, double lo = 1e-3, double hi = 50.0);

struct MuSearchResult {
  double mu = 0.0;
  double inlet_margin = 0.0;   // min over t
  double outlet_margin = 0.0;  // min over t
  double r_margin = 0.0;       // global min lambda_min(R) / max |eig R|
  double score = 0.0;          // min of the three
  bool feasible = false;
  ConditionReport report;      // at the selected mu
};

/// Picks the mu maximizing the smallest normalized margin; ties go to the
/// smaller mu. With no feasible mu the best-effort (negative) margin is kept.
MuSearchResult search_mu(const LinearCoeffs& coeffs, double p1, double p2, const std::vector<double>& mu_grid);

struct WeightSearchResult {
  double p1 = 1.0;
  double p2 = 0.0;
  MuSearchResult best;
};

/// Grid search over p2/p1 (p1 = 1, only the ratio matters) and mu.
WeightSearchResult search_weights(const LinearCoeffs& coeffs, const std::vector<double>& p2_grid,
                                  const std::vector<double>& mu_grid);

}  // namespace stenoflow
