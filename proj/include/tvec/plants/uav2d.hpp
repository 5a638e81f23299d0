#pragma once

// Planar UAV holding an object hinged to the ground.
//   x1 = [alpha, alpha_dot]  (object angle from horizontal)
//   x2 = [beta, beta_dot]    (thrust direction from horizontal)
//   u  = [T, tau]

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "tvec/plants/common.hpp"

namespace tvec::plants {

struct Uav2dParams {
  double m_u = 0.1;    // kg
  double I_u = 1.014;  // kg m^2
  double m_o = 0.03;   // kg
  double I_o = 2.0;    // kg m^2
  double ell = 1.25;   // m
  double g = kDefaultGravity;

  double I_tilde() const { return m_o * ell * ell / 4.0 + I_o + m_u * ell * ell; }
  double m_tilde() const { return m_o / 2.0 + m_u; }

  void validate() const {
    if (!(m_u > 0 && I_u > 0 && m_o > 0 && I_o > 0 && ell > 0 && g > 0))
      throw std::invalid_argument("uav2d: masses, inertias, ell and g must be strictly positive");
  }
};

class Uav2d {
 public:
  static constexpr const char* name = "uav2d";
  static constexpr std::size_t n1 = 2, n2 = 2, m1 = 1, m2 = 1, m_eff = 1;
  static constexpr std::size_t n = n1 + n2, m = m1 + m2;
  static constexpr std::size_t kernel_arity = 1;  // gamma: kernel attitude rate
  static constexpr std::size_t reference_dim = 1;  // alpha_d
  static constexpr std::array<const char*, n> state_names{"alpha", "alpha_dot", "beta", "beta_dot"};
  static constexpr std::array<const char*, m> input_names{"u1", "u2"};
  static constexpr std::array<bool, n> angle_state{true, false, true, false};
  static constexpr bool quaternion_x2 = false;
  static constexpr std::array<std::size_t, 1> setpoint_components{0};  // within x2
  static constexpr std::array<std::size_t, 1> reference_states{0};     // within x1

  Uav2dParams params;
  InputBounds<m> bounds{{0.0, -0.2}, {5.0, 0.2}};

  Uav2d() = default;
  explicit Uav2d(const Uav2dParams& p, const InputBounds<m>& b) : params(p), bounds(b) {
    params.validate();
    bounds.validate();
    check_overactuation<Uav2d>();
  }

  template <class T>
  std::array<T, n1> f1(const std::array<T, n1>& x1, const std::array<T, n2>& x2, const std::array<T, m1>& u1) const {
    using std::cos;
    const double It = params.I_tilde();
    const T psi = effective_control(x1, x2, u1)[0];
    return {x1[1], params.ell / It * (psi - params.m_tilde() * params.g * cos(x1[0]))};
  }

  template <class T>
  std::array<T, n2> f2(const std::array<T, n2>& x2, const std::array<T, m2>& u2) const {
    return {x2[1], u2[0] / params.I_u};
  }

  template <class T>
  std::array<T, m_eff> effective_control(const std::array<T, n1>& x1, const std::array<T, n2>& x2,
                                         const std::array<T, m1>& u1) const {
    using std::sin;
    return {u1[0] * sin(x2[0] - x1[0])};
  }

  /// K_n(x1) = [alpha + n pi, gamma]
  template <class T>
  std::array<T, n2> kernel_point(const std::array<T, n1>& x1, int branch, std::span<const double> free) const {
    require_arity<kernel_arity>(free, name);
    return {x1[0] + branch * M_PI, T(free[0])};
  }

  template <class T>
  void renormalize(std::array<T, n>&) const {}

  static std::array<double, n1> x1_reference(std::span<const double> ref) { return {ref[0], 0.0}; }

  /// Mechanical energy of the object/UAV arm for u = 0 (conserved quantity).
  double arm_energy(const std::array<double, n>& x) const {
    return 0.5 * params.I_tilde() * x[1] * x[1] + params.m_tilde() * params.g * params.ell * std::sin(x[0]);
  }
};

}  // namespace tvec::plants
