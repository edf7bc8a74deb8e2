#include "stenoflow/inflow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stenoflow/model.hpp"

namespace stenoflow {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_numbers(const std::string& text, int line_no) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size())
      throw std::invalid_argument("waveform line " + std::to_string(line_no) + ": bad number '" + item + "'");
    out.push_back(value);
  }
  return out;
}

}  // namespace

InflowWaveform InflowWaveform::harmonic(double period, double mean, std::vector<Harmonic> harmonics) {
  InflowWaveform w;
  w.period_ = period;
  w.mean_ = mean;
  w.harmonics_ = std::move(harmonics);
  w.validate(false);
  return w;
}

InflowWaveform InflowWaveform::table(double period, std::vector<double> times, std::vector<double> flows) {
  if (times.size() != flows.size() || times.size() < 2)
    throw std::invalid_argument("waveform table needs at least two (t, q) pairs");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || times[i] >= period)
      throw std::invalid_argument("waveform table times must lie in [0, period)");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("waveform table times must be strictly increasing");
  }
  InflowWaveform w;
  w.period_ = period;
  w.table_t_ = std::move(times);
  w.table_q_ = std::move(flows);
  double sum = 0.0;
  for (double q : w.table_q_) sum += q;
  w.mean_ = sum / static_cast<double>(w.table_q_.size());
  w.validate(false);
  return w;
}

InflowWaveform InflowWaveform::constant(double flow) {
  InflowWaveform w;
  w.period_ = 1.0;
  w.mean_ = flow;
  w.validate(true);
  return w;
}

InflowWaveform InflowWaveform::default_heartbeat() {
  return harmonic(0.8, 3.2e-5,
                  {{1, 4.7345e-6, 1.46972e-5}, {2, -9.3323e-6, 6.763e-6}, {3, -5.7091e-6, -4.1089e-6}});
}

void InflowWaveform::validate(bool allow_zero) const {
  if (!(period_ > 0.0) || !std::isfinite(period_))
    throw std::invalid_argument("waveform period must be positive");
  for (const auto& h : harmonics_)
    if (h.order < 1) throw std::invalid_argument("harmonic order must be >= 1");
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    const double q = evaluate(period_ * i / samples);
    const bool ok = allow_zero ? q >= 0.0 : q > 0.0;
    if (!ok || !std::isfinite(q))
      throw std::invalid_argument("inflow waveform must stay positive over the period");
  }
}

double InflowWaveform::evaluate(double t) const {
  double phase = std::fmod(t, period_);
  if (phase < 0.0) phase += period_;
  if (!table_t_.empty()) {
    const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), phase);
    double t0, t1, q0, q1;
    if (it == table_t_.begin() || it == table_t_.end()) {
      // Wrap segment between the last sample and the first one of the next period.
      t0 = table_t_.back();
      q0 = table_q_.back();
      t1 = table_t_.front() + period_;
      q1 = table_q_.front();
      if (phase < t0) phase += period_;
    } else {
      const auto i = static_cast<std::size_t>(it - table_t_.begin());
      t0 = table_t_[i - 1];
      t1 = table_t_[i];
      q0 = table_q_[i - 1];
      q1 = table_q_[i];
    }
    return q0 + (q1 - q0) * (phase - t0) / (t1 - t0);
  }
  double q = mean_;
  const double w = 2.0 * kPi * phase / period_;
  for (const auto& h : harmonics_) {
    q += h.cos_amp * std::cos(h.order * w) + h.sin_amp * std::sin(h.order * w);
  }
  return q;
}

double InflowWaveform::peak_phase(int samples) const {
  double best_t = 0.0;
  double best_q = evaluate(0.0);
  for (int i = 1; i < samples; ++i) {
    const double t = period_ * i / samples;
    const double q = evaluate(t);
    if (q > best_q) {
      best_q = q;
      best_t = t;
    }
  }
  return best_t;
}

std::pair<double, double> InflowWaveform::extrema(int samples) const {
  double lo = evaluate(0.0);
  double hi = lo;
  for (int i = 1; i < samples; ++i) {
    const double q = evaluate(period_ * i / samples);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return {lo, hi};
}

InflowWaveform InflowWaveform::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  double period = -1.0;
  double mean = 0.0;
  bool have_mean = false;
  bool in_table = false;
  std::vector<Harmonic> harmonics;
  std::vector<double> times, flows;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "table") {
      in_table = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!in_table)
        throw std::invalid_argument("waveform line " + std::to_string(line_no) + ": expected 'key = value'");
      const auto pair = parse_numbers(line, line_no);
      if (pair.size() != 2)
        throw std::invalid_argument("waveform line " + std::to_string(line_no) + ": expected 't, q'");
      times.push_back(pair[0]);
      flows.push_back(pair[1]);
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const auto values = parse_numbers(line.substr(eq + 1), line_no);
    if (key == "period" && values.size() == 1) {
      period = values[0];
    } else if (key == "mean" && values.size() == 1) {
      mean = values[0];
      have_mean = true;
    } else if (key == "harmonic" && values.size() == 3) {
      const double order = values[0];
      if (order != std::floor(order))
        throw std::invalid_argument("waveform line " + std::to_string(line_no) + ": harmonic order must be an integer");
      harmonics.push_back({static_cast<int>(order), values[1], values[2]});
    } else {
      throw std::invalid_argument("waveform line " + std::to_string(line_no) + ": unknown or malformed key '" + key + "'");
    }
  }
  if (period <= 0.0) throw std::invalid_argument("waveform: missing or non-positive 'period'");
  if (!times.empty()) {
    if (have_mean || !harmonics.empty())
      throw std::invalid_argument("waveform: a table cannot be combined with mean/harmonic keys");
    return table(period, std::move(times), std::move(flows));
  }
  if (!have_mean) throw std::invalid_argument("waveform: missing 'mean'");
  return harmonic(period, mean, std::move(harmonics));
}

InflowWaveform InflowWaveform::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open waveform file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

}  // namespace stenoflow
