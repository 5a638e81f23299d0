#pragma once

// Trajectory CSV, solver log CSV and the per-scenario metrics report.
//
// trajectory.csv columns, per model:
//   uav2d   t, alpha, alpha_dot, beta, beta_dot, u1, u2, beta_d, eff_ctrl,
//           kernel_dist, delta2_0, delta1_rate_0
//   uav3d   t, phi, theta, phi_dot, theta_dot, q0..q3, wx, wy, wz, T, tau_x,
//           tau_y, tau_z, q0_d..q3_d, eff_ctrl_0, eff_ctrl_1, kernel_dist,
//           delta2_0..3, delta1_rate_0..3
//   vessel  t, x_v, y_v, alpha_v, x_v_dot, y_v_dot, alpha_v_dot, theta_1,
//           theta_2, theta_1_dot, theta_2_dot, T1, T2, tau1, tau2, theta_1_d,
//           theta_2_d, eff_ctrl_0..2, kernel_dist, delta2_0, delta2_1,
//           delta1_rate_0, delta1_rate_1
// All numbers are printed with %.17g.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tvec/cli/scenario.hpp"
#include "tvec/sim/metrics.hpp"

namespace tvec::cli {

using nlohmann::json;

inline std::string trajectory_csv(const sim::TrajectoryLog& log) {
  std::vector<std::string> cols{"t"};
  cols.insert(cols.end(), log.state_names.begin(), log.state_names.end());
  cols.insert(cols.end(), log.input_names.begin(), log.input_names.end());
  cols.insert(cols.end(), log.setpoint_names.begin(), log.setpoint_names.end());
  const std::size_t n_eff = log.eff_ctrl.empty() ? 0 : log.eff_ctrl.front().size();
  if (n_eff == 1) {
    cols.emplace_back("eff_ctrl");
  } else {
    for (std::size_t j = 0; j < n_eff; ++j) cols.push_back("eff_ctrl_" + std::to_string(j));
  }
  cols.emplace_back("kernel_dist");
  for (std::size_t j = 0; j < log.setpoint_names.size(); ++j) cols.push_back("delta2_" + std::to_string(j));
  for (std::size_t j = 0; j < log.setpoint_names.size(); ++j) cols.push_back("delta1_rate_" + std::to_string(j));

  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  char buf[32];
  auto put = [&](double v, bool first = false) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!first) out += ',';
    out += buf;
  };
  for (std::size_t k = 0; k < log.size(); ++k) {
    put(log.t[k], true);
    for (double v : log.x[k]) put(v);
    for (double v : log.u[k]) put(v);
    for (double v : log.x2d[k]) put(v);
    for (double v : log.eff_ctrl[k]) put(v);
    put(log.kernel_dist[k]);
    for (double v : log.delta2[k]) put(v);
    for (double v : log.delta1_rate[k]) put(v);
    out += '\n';
  }
  return out;
}

inline std::string solver_csv(const sim::TrajectoryLog& log) {
  std::string out = "t,iterations,status,cost,kkt_residual,equality_residual,failed\n";
  char buf[256];
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& s = log.solver[k];
    std::snprintf(buf, sizeof buf, "%.17g,%d,%s,%.17g,%.17g,%.17g,%d\n", log.t[k], s.iterations, s.status.c_str(),
                  s.cost, s.kkt_residual, s.equality_residual, s.failed ? 1 : 0);
    out += buf;
  }
  return out;
}

enum class Flag { pass, fail, not_applicable };

inline const char* to_string(Flag f) {
  switch (f) {
    case Flag::pass: return "pass";
    case Flag::fail: return "fail";
    case Flag::not_applicable: return "not-applicable";
  }
  return "?";
}
inline Flag flag_of(bool ok) { return ok ? Flag::pass : Flag::fail; }

struct ChannelMetrics {
  std::string name;
  std::optional<double> settling_time;
  double steady_error = 0.0;
  bool oscillating = false;
  int peak_count = 0;
  std::vector<double> interval_start_error;  // signed error at the first sample of each interval
  std::vector<double> interval_end_error;    // signed error at the last sample before each switch
};

struct Metrics {
  std::vector<ChannelMetrics> channels;
  bool oscillating = false;
  int peak_count = 0;
  double gain1_hat = 0.0, gain2_hat = 0.0, gain_product = 0.0;
  double tail_sup_delta2 = 0.0, tail_sup_delta1_rate = 0.0;
  double thrust_effort = 0.0, torque_effort = 0.0;
  std::size_t bounds_violations = 0;
  std::optional<double> max_qd_norm_deviation;  // quaternion models only
  double tail_kernel_dist_max = 0.0;
  std::size_t solves = 0, converged = 0, iteration_cap = 0, numeric_failure = 0;
  std::optional<std::size_t> failed_at;
  std::string failure;
  std::size_t samples = 0;
};

/// Metrics of a finished run. Settling is measured on the wrapped tracking
/// error against zero over the whole log.
inline Metrics compute_metrics(const RunResult& run) {
  const auto& log = run.log;
  const auto& s = run.config.scenario;
  Metrics m;
  m.samples = log.size();
  for (std::size_t c = 0; c < log.reference_states.size(); ++c) {
    ChannelMetrics ch;
    ch.name = log.state_names[log.reference_states[c]];
    const auto e = sim::tracking_error(log, c);
    if (!e.empty()) {
      ch.settling_time = sim::settling_time(log.t, e, 0.0, s.settle_tol[c], s.settle_hold);
      ch.steady_error = std::abs(e.back());
      const auto osc = sim::oscillation_detect(log.t, e, s.osc_window);
      ch.oscillating = osc.oscillating;
      ch.peak_count = osc.peak_count;
      const double slack = 1e-9;
      for (std::size_t i = 0; i < s.schedule_times.size(); ++i) {
        const double a = s.schedule_times[i];
        const double b = i + 1 < s.schedule_times.size() ? s.schedule_times[i + 1] : log.t.back() + 1.0;
        std::optional<std::size_t> first, last;
        for (std::size_t k = 0; k < log.size(); ++k)
          if (log.t[k] >= a - slack && log.t[k] < b - slack) {
            if (!first) first = k;
            last = k;
          }
        ch.interval_start_error.push_back(first ? e[*first] : std::nan(""));
        ch.interval_end_error.push_back(last ? e[*last] : std::nan(""));
      }
    }
    m.oscillating = m.oscillating || ch.oscillating;
    m.peak_count += ch.peak_count;
    m.channels.push_back(std::move(ch));
  }
  if (log.size() >= 10) {
    const std::size_t tail = static_cast<std::size_t>(std::floor((1.0 - s.tail_fraction) * log.size()));
    if (log.size() - tail >= 10) {
      const auto g = sim::estimate_gains(log, s.tail_fraction);
      m.gain1_hat = g.gain1;
      m.gain2_hat = g.gain2;
      m.gain_product = g.product();
      m.tail_sup_delta2 = g.sup_delta2;
      m.tail_sup_delta1_rate = g.sup_delta1_rate;
    }
    for (std::size_t k = tail; k < log.size(); ++k) m.tail_kernel_dist_max = std::max(m.tail_kernel_dist_max, log.kernel_dist[k]);
  }
  const auto eff = sim::input_efforts(log);
  m.thrust_effort = eff.thrust;
  m.torque_effort = eff.torque;
  for (const auto& u : log.u)
    for (std::size_t j = 0; j < u.size(); ++j)
      if (u[j] < run.config.u_min[j] || u[j] > run.config.u_max[j]) ++m.bounds_violations;
  if (run.config.model == "uav3d") {
    double worst = 0.0;
    for (const auto& q : log.x2d) {
      double n2 = 0.0;
      for (std::size_t i = 0; i < 4 && i < q.size(); ++i) n2 += q[i] * q[i];
      worst = std::max(worst, std::abs(std::sqrt(n2) - 1.0));
    }
    m.max_qd_norm_deviation = worst;
  }
  if (log.has_solver)
    for (const auto& r : log.solver) {
      ++m.solves;
      if (r.status == "converged") ++m.converged;
      if (r.status == "iteration_cap") ++m.iteration_cap;
      if (r.status == "numeric_failure") ++m.numeric_failure;
    }
  m.failed_at = log.failed_at;
  m.failure = log.failure;
  return m;
}

namespace detail {

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline json number_or_null(const std::optional<double>& v) { return v ? number_or_null(*v) : json(nullptr); }
inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

}  // namespace detail

/// Assertions every scenario carries, independent of the acceptance gate.
inline json scenario_flags(const RunResult& run, const Metrics& m) {
  json f;
  bool settled = !m.channels.empty();
  for (const auto& c : m.channels) settled = settled && c.settling_time.has_value();
  f["settled"] = to_string(flag_of(settled));
  f["input_bounds"] = to_string(flag_of(m.bounds_violations == 0));
  f["integration"] = to_string(flag_of(!m.failed_at));
  f["quaternion_norm"] =
      to_string(m.max_qd_norm_deviation && run.config.is_kpca() ? flag_of(*m.max_qd_norm_deviation <= 1e-6)
                                                                : Flag::not_applicable);
  f["solver"] = to_string(run.config.is_kpca() ? flag_of(m.numeric_failure == 0) : Flag::not_applicable);
  return f;
}

inline json metrics_json(const RunResult& run, const Metrics& m) {
  json j;
  j["scenario"] = run.config.scenario.name;
  j["model"] = run.config.model;
  j["controller"] = run.config.controller;
  j["runtime_s"] = run.runtime_s;
  j["samples"] = m.samples;
  j["schedule_times"] = run.config.scenario.schedule_times;
  json chans = json::array();
  for (const auto& c : m.channels) {
    json cj;
    cj["name"] = c.name;
    cj["settling_time"] = detail::number_or_null(c.settling_time);
    cj["steady_error"] = detail::number_or_null(c.steady_error);
    cj["oscillating"] = c.oscillating;
    cj["peak_count"] = c.peak_count;
    cj["interval_start_error"] = detail::numbers(c.interval_start_error);
    cj["interval_end_error"] = detail::numbers(c.interval_end_error);
    chans.push_back(cj);
  }
  j["channels"] = chans;
  j["oscillating"] = m.oscillating;
  j["peak_count"] = m.peak_count;
  j["gain1_hat"] = detail::number_or_null(m.gain1_hat);
  j["gain2_hat"] = detail::number_or_null(m.gain2_hat);
  j["gain_product"] = detail::number_or_null(m.gain_product);
  j["tail_fraction"] = run.config.scenario.tail_fraction;
  j["tail_sup_delta2"] = detail::number_or_null(m.tail_sup_delta2);
  j["tail_sup_delta1_rate"] = detail::number_or_null(m.tail_sup_delta1_rate);
  j["thrust_effort"] = detail::number_or_null(m.thrust_effort);
  j["torque_effort"] = detail::number_or_null(m.torque_effort);
  j["bounds_violations"] = m.bounds_violations;
  j["max_qd_norm_deviation"] = detail::number_or_null(m.max_qd_norm_deviation);
  j["tail_kernel_dist_max"] = detail::number_or_null(m.tail_kernel_dist_max);
  j["solver"] = {{"solves", m.solves},
                 {"converged", m.converged},
                 {"iteration_cap", m.iteration_cap},
                 {"numeric_failure", m.numeric_failure}};
  j["failed_at"] = m.failed_at ? json(*m.failed_at) : json(nullptr);
  j["failure"] = m.failure;
  j["flags"] = scenario_flags(run, m);
  j["config"] = dump_config(run.config);
  return j;
}

}  // namespace tvec::cli
