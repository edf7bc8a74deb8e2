#pragma once

#include <cmath>
#include <optional>
#include <tuple>
#include <utility>

namespace stenoflow {

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Newton iteration kept inside a sign-change bracket [lo, hi]; a bisection
/// step replaces any Newton step that leaves the bracket or stalls.
/// `fdf(x)` returns {f(x), f'(x)}. Returns nullopt if the bracket is not a
/// sign change or the iteration cap is hit before either tolerance is met.
template <class Fn>
std::optional<RootResult> safeguarded_newton(Fn&& fdf, double lo, double hi, double x0, double x_rtol,
                                             double f_atol, int max_iter = 60) {
  const double flo = fdf(lo).first;
  const double fhi = fdf(hi).first;
  if (flo == 0.0) return RootResult{lo, 0.0, 0};
  if (fhi == 0.0) return RootResult{hi, 0.0, 0};
  if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
  // Orient so that f(lo) < 0 < f(hi).
  if (flo > 0.0) std::swap(lo, hi);

  double x = (x0 > std::fmin(lo, hi) && x0 < std::fmax(lo, hi)) ? x0 : 0.5 * (lo + hi);
  double dx_old = std::fabs(hi - lo);
  double dx = dx_old;
  double f = 0.0;
  double df = 0.0;
  std::tie(f, df) = fdf(x);
  for (int it = 1; it <= max_iter; ++it) {
    if (std::fabs(f) <= f_atol) return RootResult{x, f, it - 1};
    const bool newton_leaves = ((x - hi) * df - f) * ((x - lo) * df - f) > 0.0;
    const bool newton_slow = std::fabs(2.0 * f) > std::fabs(dx_old * df);
    dx_old = dx;
    if (newton_leaves || newton_slow || df == 0.0) {
      dx = 0.5 * (hi - lo);
      x = lo + dx;
    } else {
      dx = f / df;
      x -= dx;
    }
    std::tie(f, df) = fdf(x);
    if (f < 0.0) lo = x; else hi = x;
    if (std::fabs(dx) <= x_rtol * std::fabs(x)) return RootResult{x, f, it};
  }
  return std::nullopt;
}

}  // namespace stenoflow
