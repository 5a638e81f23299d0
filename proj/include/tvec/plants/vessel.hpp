#pragma once

// Surface vessel with two azimuthal thrusters.
//   x1 = [x_v, y_v, alpha_v, x_v', y_v', alpha_v']
//   x2 = [theta_1, theta_2, theta_1', theta_2']
//   u  = [T1, T2, tau1, tau2]

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "tvec/plants/common.hpp"

namespace tvec::plants {

struct VesselParams {
  double m_v = 11000.0;  // kg
  double I_v = 36062.0;  // kg m^2
  double I_p = 700.0;    // kg m^2
  double ell_x = -2.75;  // m
  double ell_y = 0.894;  // m

  void validate() const {
    if (!(m_v > 0 && I_v > 0 && I_p > 0)) throw std::invalid_argument("vessel: m_v, I_v, I_p must be > 0");
    if (!(ell_y >= 0)) throw std::invalid_argument("vessel: ell_y must be >= 0");
  }
};

class Vessel {
 public:
  static constexpr const char* name = "vessel";
  static constexpr std::size_t n1 = 6, n2 = 4, m1 = 2, m2 = 2, m_eff = 3;
  static constexpr std::size_t n = n1 + n2, m = m1 + m2;
  static constexpr std::size_t kernel_arity = 2;  // gamma_1, gamma_2
  static constexpr std::size_t reference_dim = 3;  // x_d, y_d, alpha_d
  static constexpr std::array<const char*, n> state_names{"x_v",    "y_v",    "alpha_v",    "x_v_dot",    "y_v_dot",
                                                          "alpha_v_dot", "theta_1", "theta_2", "theta_1_dot", "theta_2_dot"};
  static constexpr std::array<const char*, m> input_names{"T1", "T2", "tau1", "tau2"};
  static constexpr std::array<bool, n> angle_state{false, false, true, false, false, false, true, true, false, false};
  static constexpr bool quaternion_x2 = false;
  static constexpr std::array<std::size_t, 2> setpoint_components{0, 1};
  static constexpr std::array<std::size_t, 3> reference_states{0, 1, 2};

  VesselParams params;
  InputBounds<m> bounds{{0.0, 0.0, -1325.0, -1325.0}, {12400.0, 12400.0, 1325.0, 1325.0}};
  double theta_limit = M_PI;  // |theta_i| <= theta_limit

  Vessel() = default;
  Vessel(const VesselParams& p, const InputBounds<m>& b, double limit = M_PI)
      : params(p), bounds(b), theta_limit(limit) {
    params.validate();
    bounds.validate();
    if (!(theta_limit > 0)) throw std::invalid_argument("vessel: theta_limit must be > 0");
    check_overactuation<Vessel>();
  }

  template <class T>
  std::array<T, n1> f1(const std::array<T, n1>& x1, const std::array<T, n2>& x2, const std::array<T, m1>& u1) const {
    const auto w = effective_control(x1, x2, u1);
    return {x1[3], x1[4], x1[5], w[0] / params.m_v, w[1] / params.m_v, w[2] / params.I_v};
  }

  template <class T>
  std::array<T, n2> f2(const std::array<T, n2>& x2, const std::array<T, m2>& u2) const {
    return {x2[2], x2[3], u2[0] / params.I_p, u2[1] / params.I_p};
  }

  /// World-frame force and yaw torque. The torque row uses the body-frame
  /// propeller angles, the force rows the world-frame ones.
  template <class T>
  std::array<T, m_eff> effective_control(const std::array<T, n1>& x1, const std::array<T, n2>& x2,
                                         const std::array<T, m1>& u1) const {
    using std::cos;
    using std::sin;
    const T& a = x1[2];
    const T& T1 = u1[0];
    const T& T2 = u1[1];
    const T c1 = cos(x2[0]), s1 = sin(x2[0]), c2 = cos(x2[1]), s2 = sin(x2[1]);
    return {T1 * cos(x2[0] + a) + T2 * cos(x2[1] + a), T1 * sin(x2[0] + a) + T2 * sin(x2[1] + a),
            params.ell_y * (T1 * c1 - T2 * c2) - params.ell_x * (T1 * s1 + T2 * s2)};
  }

  /// K_n = [pi/2 + n pi, -pi/2 + n pi, gamma_1, gamma_2]; zero effective
  /// control for equal thrusts.
  template <class T>
  std::array<T, n2> kernel_point(const std::array<T, n1>&, int branch, std::span<const double> free) const {
    require_arity<kernel_arity>(free, name);
    return {T(M_PI / 2.0 + branch * M_PI), T(-M_PI / 2.0 + branch * M_PI), T(free[0]), T(free[1])};
  }

  template <class T>
  void renormalize(std::array<T, n>&) const {}

  static std::array<double, n1> x1_reference(std::span<const double> ref) {
    return {ref[0], ref[1], ref[2], 0.0, 0.0, 0.0};
  }
};

}  // namespace tvec::plants
