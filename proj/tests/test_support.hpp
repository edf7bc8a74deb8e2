#pragma once

#include <cmath>
#include <cstdlib>
#include <random>

#include "stenoflow/model.hpp"

namespace testing_support {

/// Seed for randomized checks; override with STENOFLOW_TEST_SEED.
inline unsigned long long test_seed() {
  if (const char* s = std::getenv("STENOFLOW_TEST_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240611ULL;
}

inline std::mt19937_64 make_rng(unsigned long long salt = 0) { return std::mt19937_64(test_seed() + salt); }

inline double rel_err(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

/// Random state with 0.3 A0 <= A <= 3 A0 and 0 < V < c(A).
inline stenoflow::StatePoint random_omega_state(const stenoflow::Artery& art, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> area(0.3, 3.0);
  std::uniform_real_distribution<double> frac(0.001, 0.999);
  const double A = area(rng) * art.A0();
  return {A, frac(rng) * art.wave_speed(A)};
}

}  // namespace testing_support
