#pragma once

// Scalar summaries of a TrajectoryLog.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvec/math/rotation.hpp"
#include "tvec/sim/log.hpp"
#include "tvec/sim/schedule.hpp"

namespace tvec::sim {

/// Earliest t_i in [t_begin, t_end) from which |signal - target| <= tol holds
/// for every sample up to t_end, provided the data covers at least `hold`
/// seconds after t_i. t_end defaults to the end of the data.
inline std::optional<double> settling_time(std::span<const double> t, std::span<const double> signal, double target,
                                           double tol, double hold, double t_begin = 0.0,
                                           double t_end = std::numeric_limits<double>::infinity()) {
  if (t.size() != signal.size()) throw std::invalid_argument("settling_time: size mismatch");
  constexpr double slack = 1e-9;
  std::size_t first = 0;
  while (first < t.size() && t[first] < t_begin - slack) ++first;
  std::size_t last = first;  // one past the final sample of the window
  while (last < t.size() && t[last] < t_end - slack) ++last;
  if (first >= last) return std::nullopt;
  std::size_t candidate = first;
  for (std::size_t i = last; i-- > first;)
    if (!(std::abs(signal[i] - target) <= tol)) {
      candidate = i + 1;
      break;
    }
  if (candidate >= last) return std::nullopt;
  if (t[last - 1] - t[candidate] < hold - slack) return std::nullopt;
  return t[candidate];
}

struct OscillationResult {
  bool oscillating = false;
  int peak_count = 0;
};

/// Sustained oscillation of an error signal over the trailing window: at least
/// four sign changes and a last-quarter peak-to-peak amplitude no smaller than
/// half the first-quarter one. peak_count counts strict local maxima over the
/// whole signal.
inline OscillationResult oscillation_detect(std::span<const double> t, std::span<const double> error, double window) {
  if (t.size() != error.size()) throw std::invalid_argument("oscillation_detect: size mismatch");
  OscillationResult r;
  const std::size_t n = t.size();
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (error[i] > error[i - 1] && error[i] >= error[i + 1]) ++r.peak_count;
  if (n < 8) return r;

  std::size_t start = 0;
  while (start < n && t[start] < t[n - 1] - window - 1e-9) ++start;
  const std::size_t len = n - start;
  if (len < 8) return r;

  int changes = 0;
  int last_sign = 0;
  for (std::size_t i = start; i < n; ++i) {
    const int s = error[i] > 0.0 ? 1 : (error[i] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  auto p2p = [&](std::size_t a, std::size_t b) {
    const auto [lo, hi] = std::minmax_element(error.begin() + static_cast<std::ptrdiff_t>(a),
                                              error.begin() + static_cast<std::ptrdiff_t>(b));
    return *hi - *lo;
  };
  const std::size_t q = len / 4;
  const double first_amp = p2p(start, start + q);
  const double last_amp = p2p(n - q, n);
  r.oscillating = changes >= 4 && last_amp >= 0.5 * first_amp && last_amp > 0.0;
  return r;
}

struct GainEstimate {
  double gain1 = 0.0;  // sup|delta1_rate| / sup|delta2|
  double gain2 = 0.0;  // sup|delta2| / sup|delta1_rate|
  double sup_delta2 = 0.0;
  double sup_delta1_rate = 0.0;
  double product() const { return gain1 * gain2; }
};

inline constexpr double kGainFloor = 1e-9;

/// Empirical asymptotic gains over the trailing `tail_fraction` of the log.
inline GainEstimate estimate_gains(const TrajectoryLog& log, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("estimate_gains: tail_fraction must lie in (0, 1]");
  const std::size_t n = log.delta2.size();
  const auto start = static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * static_cast<double>(n)));
  if (n < start + 10) throw std::invalid_argument("estimate_gains: fewer than 10 tail samples");
  GainEstimate g;
  auto sup = [&](const std::vector<std::vector<double>>& s) {
    double m = 0.0;
    for (std::size_t i = start; i < n; ++i) {
      double acc = 0.0;
      for (double v : s[i]) acc += v * v;
      m = std::max(m, std::sqrt(acc));
    }
    return m;
  };
  g.sup_delta2 = sup(log.delta2);
  g.sup_delta1_rate = sup(log.delta1_rate);
  if (g.sup_delta2 < kGainFloor && g.sup_delta1_rate < kGainFloor) return g;
  g.gain1 = g.sup_delta1_rate / std::max(g.sup_delta2, kGainFloor);
  g.gain2 = g.sup_delta2 / std::max(g.sup_delta1_rate, kGainFloor);
  return g;
}

/// Tracking error of reference channel `channel`: x[state] - ref, wrapped for angles.
inline std::vector<double> tracking_error(const TrajectoryLog& log, std::size_t channel) {
  if (channel >= log.reference_states.size()) throw std::invalid_argument("tracking_error: unknown channel");
  const std::size_t s = log.reference_states[channel];
  std::vector<double> e(log.size());
  for (std::size_t k = 0; k < log.size(); ++k) {
    const double d = log.x[k][s] - log.reference[k][channel];
    e[k] = log.state_is_angle[s] ? math::wrap_angle(d) : d;
  }
  return e;
}

/// Samples of a named column: a state, an input, kernel_dist, or
/// eff_ctrl_i / delta2_i / delta1_rate_i.
inline std::vector<double> channel(const TrajectoryLog& log, const std::string& name) {
  std::vector<double> out(log.size());
  auto pick = [&](const std::vector<std::vector<double>>& rows, std::size_t j) {
    for (std::size_t k = 0; k < log.size(); ++k) out[k] = rows[k][j];
    return out;
  };
  for (std::size_t j = 0; j < log.state_names.size(); ++j)
    if (log.state_names[j] == name) return pick(log.x, j);
  for (std::size_t j = 0; j < log.input_names.size(); ++j)
    if (log.input_names[j] == name) return pick(log.u, j);
  if (name == "kernel_dist") return log.kernel_dist;
  const std::pair<const char*, const std::vector<std::vector<double>>*> indexed[] = {
      {"eff_ctrl_", &log.eff_ctrl}, {"delta2_", &log.delta2}, {"delta1_rate_", &log.delta1_rate}};
  for (const auto& [prefix, rows] : indexed) {
    const std::string p(prefix);
    if (name.rfind(p, 0) == 0 && name.size() > p.size()) {
      const std::size_t j = std::stoul(name.substr(p.size()));
      if (!rows->empty() && j < rows->front().size()) return pick(*rows, j);
    }
  }
  throw std::invalid_argument("unknown channel '" + name + "'");
}

struct Efforts {
  double thrust = 0.0;  // integral of ||u1|| dt
  double torque = 0.0;  // integral of ||u2|| dt
};

/// Input integrals under zero-order hold (the final record is not applied).
inline Efforts input_efforts(const TrajectoryLog& log) {
  Efforts e;
  const std::size_t applied = log.size() > 0 ? log.size() - 1 : 0;
  for (std::size_t k = 0; k < applied; ++k) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < log.u[k].size(); ++j) (j < log.m1 ? a : b) += log.u[k][j] * log.u[k][j];
    e.thrust += std::sqrt(a) * log.Ts;
    e.torque += std::sqrt(b) * log.Ts;
  }
  return e;
}

inline const std::vector<double>& kernel_distance_series(const TrajectoryLog& log) {
  if (!log.has_x2d) throw std::invalid_argument("kernel_distance_series: controller exposes no set-point");
  return log.kernel_dist;
}

}  // namespace tvec::sim
