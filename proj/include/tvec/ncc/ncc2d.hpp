#pragma once

// Planar thrust/attitude control laws for the UAV-object system.

#include <array>
#include <cmath>
#include <stdexcept>

#include "tvec/plants/uav2d.hpp"

namespace tvec::ncc {

struct Ncc2dGains {
  double kp_alpha = 4.0;
  double kd_alpha = 2.5;
  double kp_beta = 25.0;
  double kd_beta = 10.0;
  double epsilon = 0.4;
  double alpha_d = M_PI / 2.0;

  void validate() const {
    if (!(kp_alpha > 0 && kd_alpha > 0 && kp_beta > 0 && kd_beta > 0))
      throw std::invalid_argument("ncc2d: PD gains must be > 0");
    if (!(epsilon > 0)) throw std::invalid_argument("ncc2d: epsilon must be > 0");
    if (!(alpha_d >= 0.0 && alpha_d <= M_PI)) throw std::invalid_argument("ncc2d: alpha_d must lie in [0, pi]");
  }
};

struct Ncc2dCommand {
  double u1 = 0.0;
  double u2 = 0.0;
  double beta_d = 0.0;
  double u1_tilde_d = 0.0;
};

/// Effective control the object loop asks for: PD on alpha plus gravity compensation.
inline double ideal_effective_control(const Ncc2dGains& k, const std::array<double, 4>& x,
                                      const plants::Uav2dParams& p) {
  return k.kp_alpha * (k.alpha_d - x[0]) - k.kd_alpha * x[1] + p.m_tilde() * p.g * std::cos(x[0]);
}

inline double attitude_pd(const Ncc2dGains& k, double beta_d, const std::array<double, 4>& x) {
  return k.kp_beta * (beta_d - x[2]) - k.kd_beta * x[3];
}

/// Continuous allocation beta_d = atan(eps u) + alpha. The thrust
/// u / sin(atan(eps u)) is evaluated in the closed form sqrt(1 + eps^2 u^2) / eps,
/// which stays finite at u = 0.
inline Ncc2dCommand ncc2d_step(const Ncc2dGains& k, const std::array<double, 4>& x, const plants::Uav2dParams& p) {
  Ncc2dCommand c;
  c.u1_tilde_d = ideal_effective_control(k, x, p);
  const double eu = k.epsilon * c.u1_tilde_d;
  c.beta_d = std::atan(eu) + x[0];
  c.u1 = std::sqrt(1.0 + eu * eu) / k.epsilon;
  c.u2 = attitude_pd(k, c.beta_d, x);
  return c;
}

/// Lossless allocation: thrust perpendicular to the arm, on the side of the
/// demanded torque. Discontinuous at zero torque.
inline double optimal_mapping2d(double tau_alpha_d) { return tau_alpha_d >= 0.0 ? M_PI / 2.0 : -M_PI / 2.0; }

inline Ncc2dCommand optimal2d_step(const Ncc2dGains& k, const std::array<double, 4>& x,
                                   const plants::Uav2dParams& p) {
  Ncc2dCommand c;
  c.u1_tilde_d = ideal_effective_control(k, x, p);
  const double theta_d = optimal_mapping2d(p.ell * c.u1_tilde_d);
  c.beta_d = x[0] + theta_d;
  c.u1 = c.u1_tilde_d / std::sin(theta_d);
  c.u2 = attitude_pd(k, c.beta_d, x);
  return c;
}

}  // namespace tvec::ncc
