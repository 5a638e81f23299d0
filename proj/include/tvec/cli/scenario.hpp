#pragma once

// RunConfig -> plant, controller, schedule -> TrajectoryLog.

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "tvec/cli/config.hpp"
#include "tvec/plants/vessel.hpp"
#include "tvec/sim/controllers.hpp"
#include "tvec/sim/simulate.hpp"

namespace tvec::cli {

namespace detail {

[[noreturn]] inline void dimension_error(const std::string& section, const std::string& what) {
  throw ConfigError("[" + section + "] " + what);
}

inline void require_size(const std::vector<double>& v, std::size_t n, const std::string& section,
                         const std::string& key, const std::string& model) {
  if (v.size() != n)
    dimension_error(section, key + " needs " + std::to_string(n) + " values for " + model + ", got " +
                                 std::to_string(v.size()));
}

template <plants::PlantModel P>
void expand_for(RunConfig& c, const P& defaults, std::vector<double> settle_default) {
  auto& s = c.scenario;
  if (c.u_min.empty()) c.u_min = to_vec(defaults.bounds.lower);
  if (c.u_max.empty()) c.u_max = to_vec(defaults.bounds.upper);
  require_size(c.u_min, P::m, "plant", "u_min", P::name);
  require_size(c.u_max, P::m, "plant", "u_max", P::name);
  require_size(s.x0, P::n, "scenario", "x0", P::name);
  if (s.kernel_free.empty()) s.kernel_free.assign(P::kernel_arity, 0.0);
  require_size(s.kernel_free, P::kernel_arity, "scenario", "kernel_free", P::name);
  if (s.settle_tol.empty()) s.settle_tol = std::move(settle_default);
  require_size(s.settle_tol, P::reference_dim, "scenario", "settle_tol", P::name);
  if (s.schedule_times.empty()) dimension_error("scenario", "schedule_times must not be empty");
  require_size(s.schedule_values, s.schedule_times.size() * P::reference_dim, "scenario", "schedule_values",
               std::string(P::name) + " (" + std::to_string(P::reference_dim) + " per interval)");
  if (c.is_kpca()) {
    auto& k = c.kpca;
    require_size(k.Q, P::n, "kpca", "Q", P::name);
    require_size(k.R, P::m, "kpca", "R", P::name);
    if (k.x2d_mask.empty())
      for (std::size_t i : P::setpoint_components) k.x2d_mask.push_back(static_cast<double>(i));
    if (k.equality.empty()) k.equality = P::quaternion_x2 ? "unit_quaternion" : "none";
    if (k.penalty_states.size() != k.penalty_limits.size())
      dimension_error("kpca", "penalty_states and penalty_limits must have the same length");
  }
}

}  // namespace detail

/// Resolve model-dependent defaults and check every list length. Idempotent;
/// the result dumps to a complete config.
inline RunConfig expand(RunConfig c) {
  if (c.model == "uav2d") {
    if (c.controller != "ncc2d" && c.controller != "optimal2d" && c.controller != "kpca")
      detail::dimension_error("controller", "controller '" + c.controller + "' cannot drive model uav2d");
    detail::expand_for(c, plants::Uav2d{}, {0.01});
  } else if (c.model == "uav3d") {
    if (c.controller != "ncc3d" && c.controller != "kpca")
      detail::dimension_error("controller", "controller '" + c.controller + "' cannot drive model uav3d");
    detail::expand_for(c, plants::Uav3d{}, {0.05, 0.05});
  } else {
    if (c.controller != "kpca")
      detail::dimension_error("controller", "model vessel has no analytic controller; use controller = kpca");
    detail::expand_for(c, plants::Vessel{}, {0.2, 0.2, 0.05});
  }
  return c;
}

namespace detail {

template <std::size_t N>
std::array<double, N> to_array(const std::vector<double>& v) {
  std::array<double, N> a{};
  for (std::size_t i = 0; i < N; ++i) a[i] = v[i];
  return a;
}

template <plants::PlantModel P>
kpca::KpcaConfig<P> kpca_config(const RunConfig& c) {
  kpca::KpcaConfig<P> k;
  k.Q = to_array<P::n>(c.kpca.Q);
  k.R = to_array<P::m>(c.kpca.R);
  k.bell = {c.kpca.kappa_p, c.kpca.kappa_w};
  k.Ts = c.kpca.Ts;
  k.N = c.kpca.N;
  k.kernel_mode = kpca::kernel_mode_from(c.kpca.kernel_mode);
  k.kernel_branch = c.scenario.kernel_branch;
  k.kernel_free = c.scenario.kernel_free;
  k.x2d_mask.clear();
  for (double i : c.kpca.x2d_mask) {
    if (i < 0 || i != std::floor(i)) dimension_error("kpca", "x2d_mask entries must be non-negative integers");
    k.x2d_mask.push_back(static_cast<std::size_t>(i));
  }
  k.equality = kpca::equality_from(c.kpca.equality);
  for (std::size_t i = 0; i < c.kpca.penalty_states.size(); ++i) {
    const double s = c.kpca.penalty_states[i];
    if (s < 0 || s != std::floor(s)) dimension_error("kpca", "penalty_states entries must be non-negative integers");
    k.state_penalties.push_back({static_cast<std::size_t>(s), c.kpca.penalty_limits[i]});
  }
  k.state_penalty_weight = c.kpca.penalty_weight;
  return k;
}

template <plants::PlantModel P>
sim::TrajectoryLog run_with(const RunConfig& c, const P& plant, std::unique_ptr<sim::Controller<P>> controller) {
  const auto& s = c.scenario;
  sim::StepSchedule schedule;
  schedule.times = s.schedule_times;
  schedule.values.clear();
  for (std::size_t i = 0; i < s.schedule_times.size(); ++i)
    schedule.values.emplace_back(s.schedule_values.begin() + static_cast<std::ptrdiff_t>(i * P::reference_dim),
                                 s.schedule_values.begin() + static_cast<std::ptrdiff_t>((i + 1) * P::reference_dim));
  const sim::LoopSettings loop{s.duration, s.Ts_ctrl, s.substeps};
  const sim::KernelChoice kernel{s.kernel_branch, s.kernel_free};
  return sim::run_scenario(plant, *controller, to_array<P::n>(s.x0), schedule, loop, kernel);
}

template <plants::PlantModel P>
std::unique_ptr<sim::Controller<P>> kpca_loop(const RunConfig& c, const P& plant) {
  return std::make_unique<sim::KpcaLoop<P>>(plant, kpca_config<P>(c), c.solver);
}

}  // namespace detail

struct RunResult {
  RunConfig config;  // expanded
  sim::TrajectoryLog log;
  double runtime_s = 0.0;
};

/// Execute one scenario. Configuration problems surface as ConfigError or
/// std::invalid_argument before the loop starts.
inline RunResult run_config(const RunConfig& raw) {
  RunResult r;
  r.config = expand(raw);
  const RunConfig& c = r.config;
  const auto t0 = std::chrono::steady_clock::now();
  if (c.model == "uav2d") {
    const plants::Uav2d plant(c.uav2d, {detail::to_array<2>(c.u_min), detail::to_array<2>(c.u_max)});
    std::unique_ptr<sim::Controller<plants::Uav2d>> ctrl;
    if (c.is_kpca()) {
      ctrl = detail::kpca_loop(c, plant);
    } else {
      std::optional<plants::InputBounds<2>> clamp;
      if (c.saturate) clamp = plant.bounds;
      ctrl = std::make_unique<sim::Ncc2dController>(c.uav2d, c.ncc2d, c.controller == "optimal2d", clamp);
    }
    r.log = detail::run_with(c, plant, std::move(ctrl));
  } else if (c.model == "uav3d") {
    const plants::Uav3d plant(c.uav3d, {detail::to_array<4>(c.u_min), detail::to_array<4>(c.u_max)});
    std::unique_ptr<sim::Controller<plants::Uav3d>> ctrl;
    if (c.is_kpca()) {
      ctrl = detail::kpca_loop(c, plant);
    } else {
      std::optional<plants::InputBounds<4>> clamp;
      if (c.saturate) clamp = plant.bounds;
      ctrl = std::make_unique<sim::Ncc3dController>(c.uav3d, c.ncc3d, clamp);
    }
    r.log = detail::run_with(c, plant, std::move(ctrl));
  } else {
    const plants::Vessel plant(c.vessel, {detail::to_array<4>(c.u_min), detail::to_array<4>(c.u_max)},
                               c.theta_limit);
    r.log = detail::run_with(c, plant, detail::kpca_loop(c, plant));
  }
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace tvec::cli
