#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace stenoflow {

struct Harmonic {
  int order = 1;
  double cos_amp = 0.0;  // m^3/s
  double sin_amp = 0.0;  // m^3/s
};

/// Periodic inlet flow Qin(t). Either a truncated Fourier series around a
/// mean, or a sampled (t, q) table extended periodically with linear
/// interpolation. Immutable after construction.
class InflowWaveform {
 public:
  /// Validates positivity on 10^4 samples per period; throws
  /// std::invalid_argument otherwise.
  static InflowWaveform harmonic(double period, double mean, std::vector<Harmonic> harmonics);
  /// Table times must be strictly increasing inside [0, period).
  static InflowWaveform table(double period, std::vector<double> times, std::vector<double> flows);
  /// Constant flow (period 1 s). Zero is allowed here for rest-state tests.
  static InflowWaveform constant(double flow);
  /// Synthetic heartbeat: mean 3.2e-5 m^3/s, three harmonics, T = 0.8 s,
  /// systolic peak 6.6e-5 near t = 0.16 s, diastolic minimum 2.0e-5 just
  /// before the period boundary.
  static InflowWaveform default_heartbeat();

  /// Reads the text waveform format:
  ///   period = 0.8
  ///   mean = 3.2e-5
  ///   harmonic = 1, 4.7e-6, 1.5e-5      (order, cosine, sine)
  ///   table                             (then one "t, q" pair per line)
  /// Blank lines and '#' comments are ignored.
  static InflowWaveform from_file(const std::filesystem::path& path);
  static InflowWaveform parse(const std::string& text);

  double operator()(double t) const { return evaluate(t); }
  double evaluate(double t) const;

  double period() const { return period_; }
  double mean() const { return mean_; }
  bool is_table() const { return !table_t_.empty(); }
  const std::vector<Harmonic>& harmonics() const { return harmonics_; }

  /// Phase in [0, period) of the largest sampled flow.
  double peak_phase(int samples = 10000) const;
  /// Sampled minimum and maximum over one period.
  std::pair<double, double> extrema(int samples = 10000) const;

 private:
  InflowWaveform() = default;
  void validate(bool allow_zero) const;

  double period_ = 1.0;
  double mean_ = 0.0;
  std::vector<Harmonic> harmonics_;
  std::vector<double> table_t_;
  std::vector<double> table_q_;
};

}  // namespace stenoflow
