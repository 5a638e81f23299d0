#pragma once

#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvec/math/errors.hpp"
#include "tvec/math/rotation.hpp"
#include "tvec/plants/common.hpp"
#include "tvec/sim/controllers.hpp"
#include "tvec/sim/log.hpp"
#include "tvec/sim/schedule.hpp"

namespace tvec::sim {

struct KernelChoice {
  int branch = 0;
  std::vector<double> free;
};

struct LoopSettings {
  double duration = 10.0;
  double Ts_ctrl = 0.1;
  int substeps = 10;

  std::size_t steps() const {
    if (!(Ts_ctrl > 0.0) || !(duration > 0.0) || substeps < 1)
      throw std::invalid_argument("scenario: duration, Ts_ctrl must be > 0 and substeps >= 1");
    const double k = duration / Ts_ctrl;
    const double kr = std::round(k);
    if (std::abs(k - kr) > 1e-9 * std::max(1.0, k))
      throw std::invalid_argument("scenario: duration must be a multiple of Ts_ctrl");
    return static_cast<std::size_t>(kr);
  }
};

namespace detail {

/// Difference of set-point components a - b with angles wrapped and
/// quaternion blocks sign-aligned to b.
template <plants::PlantModel P>
std::vector<double> setpoint_difference(const std::array<double, P::n2>& a, const std::array<double, P::n2>& b) {
  std::array<double, P::n2> aa = a;
  if constexpr (P::quaternion_x2) {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d += aa[i] * b[i];
    if (d < 0.0)
      for (std::size_t i = 0; i < 4; ++i) aa[i] = -aa[i];
  }
  std::vector<double> out;
  for (std::size_t i : P::setpoint_components) {
    double v = aa[i] - b[i];
    if (P::angle_state[P::n1 + i]) v = math::wrap_angle(v);
    out.push_back(v);
  }
  return out;
}

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

template <plants::PlantModel P>
TrajectoryLog make_log_header(double Ts) {
  TrajectoryLog log;
  log.model = P::name;
  log.state_names.assign(P::state_names.begin(), P::state_names.end());
  log.input_names.assign(P::input_names.begin(), P::input_names.end());
  for (std::size_t i : P::setpoint_components) log.setpoint_names.push_back(std::string(P::state_names[P::n1 + i]) + "_d");
  log.state_is_angle.assign(P::angle_state.begin(), P::angle_state.end());
  log.reference_states.assign(P::reference_states.begin(), P::reference_states.end());
  log.m1 = P::m1;
  log.Ts = Ts;
  return log;
}

/// Closed loop with a zero-order-hold controller: at each t_k the controller
/// sees x(t_k) and the reference value at t_k; the plant is then advanced by
/// `substeps` RK4 steps. Integration failures truncate the log.
template <plants::PlantModel P>
TrajectoryLog run_scenario(const P& plant, Controller<P>& controller, const plants::StateOf<P, double>& x0,
                           const StepSchedule& schedule, const LoopSettings& loop, const KernelChoice& kernel) {
  schedule.validate(P::reference_dim);
  const std::size_t K = loop.steps();
  const double h = loop.Ts_ctrl / loop.substeps;

  TrajectoryLog log = make_log_header<P>(loop.Ts_ctrl);
  log.has_x2d = true;
  plants::StateOf<P, double> x = x0;
  plant.renormalize(x);
  std::array<double, P::n2> prev_x2d{};

  for (std::size_t k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) * loop.Ts_ctrl;
    const auto ref = schedule.value_at(t);
    const ControlOutput<P> c = controller.compute(x, ref);

    const auto x1 = plants::slice<0, P::n1, double>(x);
    const auto x2 = plants::slice<P::n1, P::n2, double>(x);
    const auto u1 = plants::slice<0, P::m1, double>(c.u);
    const auto eff = plant.effective_control(x1, x2, u1);
    const auto K0 = plant.kernel_point(x1, kernel.branch, kernel.free);

    // Quaternion set-points are sign-aligned first: q and -q are the same attitude.
    const std::vector<double> kd = detail::setpoint_difference<P>(c.x2d, K0);

    log.t.push_back(t);
    log.x.emplace_back(x.begin(), x.end());
    log.u.emplace_back(c.u.begin(), c.u.end());
    log.reference.emplace_back(ref.begin(), ref.end());
    std::vector<double> sp;
    for (std::size_t i : P::setpoint_components) sp.push_back(c.x2d[i]);
    log.x2d.push_back(sp);
    log.eff_ctrl.emplace_back(eff.begin(), eff.end());
    log.kernel_dist.push_back(detail::norm2(kd));
    log.delta2.push_back(detail::setpoint_difference<P>(c.x2d, x2));
    if (k == 0) {
      log.delta1_rate.emplace_back(P::setpoint_components.size(), 0.0);
    } else {
      auto d = detail::setpoint_difference<P>(c.x2d, prev_x2d);
      for (double& v : d) v /= loop.Ts_ctrl;
      log.delta1_rate.push_back(d);
    }
    prev_x2d = c.x2d;
    if (c.has_solver) log.has_solver = true;
    log.solver.push_back(c.solver);

    if (k == K) break;
    try {
      for (int s = 0; s < loop.substeps; ++s) x = plants::step(plant, x, c.u, h);
    } catch (const std::exception& ex) {
      log.failed_at = k + 1;
      log.failure = ex.what();
      break;
    }
  }
  return log;
}

}  // namespace tvec::sim
