#pragma once

// Spherical UAV-object control: geodesic PD for the thrust vector,
// quaternion PD for the attitude.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "tvec/math/rotation.hpp"
#include "tvec/plants/uav3d.hpp"

namespace tvec::ncc {

using math::Quaternion;
using math::Vec3;
using math::operator+;
using math::operator-;

struct GeodesicGains {
  double kp_t = 2.0;
  double kd_t = 3.0;
  double kp_q = 2.0;
  double kd_q = 0.2;
  double T_r = 1.0;
  double epsilon = 0.01;
  double psi = 0.0;

  void validate() const {
    if (!(kp_t > 0 && kd_t > 0 && kp_q > 0 && kd_q > 0)) throw std::invalid_argument("ncc3d: PD gains must be > 0");
    if (!(T_r > 0)) throw std::invalid_argument("ncc3d: T_r must be > 0");
    if (!(epsilon > 0)) throw std::invalid_argument("ncc3d: epsilon must be > 0");
  }
};

inline Vec3<double> sphere_position(double ell, double phi, double theta) {
  return {ell * std::cos(phi) * std::cos(theta), ell * std::cos(phi) * std::sin(theta), ell * std::sin(phi)};
}

inline Vec3<double> sphere_velocity(double ell, double phi, double theta, double phi_dot, double theta_dot) {
  const double cp = std::cos(phi), sp = std::sin(phi), ct = std::cos(theta), st = std::sin(theta);
  return {ell * (-sp * ct * phi_dot - cp * st * theta_dot), ell * (-sp * st * phi_dot + cp * ct * theta_dot),
          ell * cp * phi_dot};
}

/// Great-circle distance between two points on the sphere of radius ell.
inline double geodesic_distance(const Vec3<double>& p, const Vec3<double>& p_d, double ell) {
  const double c = std::clamp(math::dot(p, p_d) / (ell * ell), -1.0, 1.0);
  return ell * std::acos(c);
}

/// Unit tangent at p pointing along the geodesic toward p_d; the norm is
/// floored at epsilon so coincident and antipodal points stay finite.
inline Vec3<double> geodesic_direction(const Vec3<double>& p, const Vec3<double>& p_d, double epsilon) {
  const Vec3<double> t = math::cross(math::cross(p, p_d), p);
  return math::scale(t, 1.0 / std::max(math::norm(t), epsilon));
}

struct GeodesicForce {
  Vec3<double> T_d{};
  double T = 0.0;
};

/// T_d = dist * kp_t * t_hat - kd_t * p_dot + (G(phi) / ell) * phi_hat + T_r * r_hat.
inline GeodesicForce geodesic_force(const GeodesicGains& k, const std::array<double, 4>& x1, const Vec3<double>& p_d,
                                    const plants::Uav3dParams& params) {
  const double ell = params.ell;
  const double phi = x1[0], theta = x1[1];
  const Vec3<double> p = sphere_position(ell, phi, theta);
  const Vec3<double> p_dot = sphere_velocity(ell, phi, theta, x1[2], x1[3]);
  const Vec3<double> t_hat = geodesic_direction(p, p_d, k.epsilon);
  const Vec3<double> phi_hat{-std::cos(theta) * std::sin(phi), -std::sin(phi) * std::sin(theta), std::cos(phi)};
  const Vec3<double> r_hat = math::scale(p, 1.0 / ell);
  const double T_phi = params.g * std::cos(phi) * (params.m_o / 2.0 + params.m_u);
  const double dist = geodesic_distance(p, p_d, ell);

  GeodesicForce out;
  out.T_d = math::scale(t_hat, dist * k.kp_t) - math::scale(p_dot, k.kd_t) + math::scale(phi_hat, T_phi) +
            math::scale(r_hat, k.T_r);
  out.T = math::norm(out.T_d);
  return out;
}

/// Attitude whose body z-axis points along T_d, composed with a yaw psi
/// about that axis.
inline Quaternion<double> desired_quaternion(const Vec3<double>& T_d, double psi) {
  const double rho = std::hypot(T_d[0], T_d[1]);
  if (rho == 0.0 && T_d[2] == 0.0) throw std::invalid_argument("desired_quaternion: zero force vector");
  const double zeta = std::atan2(rho, T_d[2]);
  Quaternion<double> q_zeta;
  if (rho > 0.0) {
    const double s = std::sin(zeta / 2.0) / rho;
    q_zeta = {std::cos(zeta / 2.0), {-T_d[1] * s, T_d[0] * s, 0.0}};
  } else if (T_d[2] > 0.0) {
    q_zeta = Quaternion<double>::identity();
  } else {
    q_zeta = {0.0, {1.0, 0.0, 0.0}};  // flipped: any horizontal axis works
  }
  const Quaternion<double> q_psi{std::cos(psi / 2.0), {0.0, 0.0, std::sin(psi / 2.0)}};
  return q_zeta * q_psi;
}

/// Error quaternion of R(q)^T R(q_d), sign-selected with w >= 0.
inline Quaternion<double> attitude_error(const Quaternion<double>& q, const Quaternion<double>& q_d) {
  const auto R = math::quat_to_rotation(q);
  const auto Rd = math::quat_to_rotation(q_d);
  return math::rotation_to_quat(math::matmul(math::transpose(R), Rd));
}

inline Vec3<double> attitude_torque(const GeodesicGains& k, const Quaternion<double>& q, const Quaternion<double>& q_d,
                                    const Vec3<double>& omega) {
  const auto e = attitude_error(q, q_d);
  return math::scale(e.v, k.kp_q) - math::scale(omega, k.kd_q);
}

struct Ncc3dCommand {
  double T = 0.0;
  Vec3<double> tau{};
  Quaternion<double> q_d;
};

/// Full law on the stacked state [phi, theta, phi_dot, theta_dot, q, omega]
/// with reference (phi_d, theta_d).
inline Ncc3dCommand ncc3d_step(const GeodesicGains& k, const std::array<double, 11>& x, double phi_d, double theta_d,
                               const plants::Uav3dParams& params) {
  const std::array<double, 4> x1{x[0], x[1], x[2], x[3]};
  const auto f = geodesic_force(k, x1, sphere_position(params.ell, phi_d, theta_d), params);
  Ncc3dCommand c;
  c.T = f.T;
  c.q_d = desired_quaternion(f.T_d, k.psi);
  const Quaternion<double> q = math::normalize(Quaternion<double>{x[4], {x[5], x[6], x[7]}});
  c.tau = attitude_torque(k, q, c.q_d, {x[8], x[9], x[10]});
  return c;
}

}  // namespace tvec::ncc
