#pragma once

// Spherical UAV-object system.
//   x1 = [phi, theta, phi_dot, theta_dot]   (polar, azimuthal angle of the object)
//   x2 = [q0, q1, q2, q3, wx, wy, wz]       (UAV attitude, body rates)
//   u  = [T, tau_x, tau_y, tau_z]

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "tvec/math/rotation.hpp"
#include "tvec/plants/common.hpp"

namespace tvec::plants {

struct Uav3dParams {
  double m_u = 0.15;
  std::array<double, 3> I_u{0.005, 0.005, 0.01};
  double m_o = 0.1;
  std::array<double, 3> I_o{0.01, 2.0, 2.0};
  double ell = 3.0;
  double g = kDefaultGravity;

  double m_tilde() const { return m_o / 4.0 + m_u; }

  void validate() const {
    bool ok = m_u > 0 && m_o > 0 && ell > 0 && g > 0;
    for (int i = 0; i < 3; ++i) ok = ok && I_u[i] > 0 && I_o[i] > 0;
    if (!ok) throw std::invalid_argument("uav3d: masses, diagonal inertias, ell and g must be strictly positive");
  }
};

class Uav3d {
 public:
  static constexpr const char* name = "uav3d";
  static constexpr std::size_t n1 = 4, n2 = 7, m1 = 1, m2 = 3, m_eff = 2;
  static constexpr std::size_t n = n1 + n2, m = m1 + m2;
  static constexpr std::size_t kernel_arity = 4;  // psi, omega_0 (3)
  static constexpr std::size_t reference_dim = 2;  // phi_d, theta_d
  static constexpr std::array<const char*, n> state_names{"phi", "theta", "phi_dot", "theta_dot", "q0", "q1",
                                                          "q2",  "q3",    "wx",      "wy",        "wz"};
  static constexpr std::array<const char*, m> input_names{"T", "tau_x", "tau_y", "tau_z"};
  static constexpr std::array<bool, n> angle_state{true, true, false, false, false, false,
                                                   false, false, false, false, false};
  static constexpr bool quaternion_x2 = true;  // x2[0..3] is a unit quaternion
  static constexpr std::array<std::size_t, 4> setpoint_components{0, 1, 2, 3};
  static constexpr std::array<std::size_t, 2> reference_states{0, 1};
  static constexpr double kMaxMassCondition = 1e12;

  Uav3dParams params;
  InputBounds<m> bounds{{0.0, -0.5, -0.5, -0.5}, {7.0, 0.5, 0.5, 0.5}};

  Uav3d() = default;
  explicit Uav3d(const Uav3dParams& p, const InputBounds<m>& b) : params(p), bounds(b) {
    params.validate();
    bounds.validate();
    check_overactuation<Uav3d>();
  }

  /// Gravity term G(q)[0].
  template <class T>
  T gravity(const T& phi) const {
    using std::cos;
    return params.g * params.ell * cos(phi) * (params.m_o / 2.0 + params.m_u);
  }

  template <class T>
  std::array<T, n1> f1(const std::array<T, n1>& x1, const std::array<T, n2>& x2, const std::array<T, m1>& u1) const {
    using std::cos;
    using std::sin;
    const T& phi = x1[0];
    const T& phi_dot = x1[2];
    const T& theta_dot = x1[3];
    const double ml2 = params.m_tilde() * params.ell * params.ell;
    const T c2 = cos(phi);
    const T m11 = params.I_o[1] + 0.5 * ml2 * (1.0 - cos(2.0 * phi));
    const T m22 = params.I_o[2] + ml2 * c2 * c2;
    const double lo = std::min(math::value_of(m11), math::value_of(m22));
    const double hi = std::max(math::value_of(m11), math::value_of(m22));
    if (!(lo > 0.0) || hi / lo > kMaxMassCondition)
      throw SingularityError("uav3d: mass matrix is numerically singular");
    const T c = 0.5 * ml2 * sin(2.0 * phi);
    const T coriolis0 = c * phi_dot * phi_dot + c * theta_dot * theta_dot;
    const T coriolis1 = -c * theta_dot * phi_dot - c * phi_dot * theta_dot;
    const auto force = effective_control(x1, x2, u1);
    return {phi_dot, theta_dot, (force[0] - coriolis0 - gravity(phi)) / m11, (force[1] - coriolis1) / m22};
  }

  template <class T>
  std::array<T, n2> f2(const std::array<T, n2>& x2, const std::array<T, m2>& u2) const {
    const math::Quaternion<T> q{x2[0], {x2[1], x2[2], x2[3]}};
    const math::Vec3<T> w{x2[4], x2[5], x2[6]};
    const auto qd = math::quat_derivative(q, w);
    const auto& I = params.I_u;
    const math::Vec3<T> Iw{I[0] * w[0], I[1] * w[1], I[2] * w[2]};
    const math::Vec3<T> gyro = math::cross(w, Iw);
    return {qd.w,
            qd.v[0],
            qd.v[1],
            qd.v[2],
            (u2[0] - gyro[0]) / I[0],
            (u2[1] - gyro[1]) / I[1],
            (u2[2] - gyro[2]) / I[2]};
  }

  /// Generalized force ell * P_{theta,phi} R(q) [0 0 T]^T; the lever arm
  /// puts it in the torque units of M(q) and G(q).
  template <class T>
  std::array<T, m_eff> effective_control(const std::array<T, n1>& x1, const std::array<T, n2>& x2,
                                         const std::array<T, m1>& u1) const {
    using std::cos;
    using std::sin;
    const math::Quaternion<T> q{x2[0], {x2[1], x2[2], x2[3]}};
    const math::Vec3<T> F = math::scale(math::body_z_axis(q), u1[0]);
    const T cp = cos(x1[0]), sp = sin(x1[0]), ct = cos(x1[1]), st = sin(x1[1]);
    const double l = params.ell;
    return {l * (-ct * sp * F[0] - sp * st * F[1] + cp * F[2]), l * (-st * F[0] + ct * F[1])};
  }

  /// Attitude with the thrust axis along +/- the radial direction:
  /// q = qz(theta) * qy(pi/2 - phi - n pi) * qz(psi), body rates omega_0.
  template <class T>
  std::array<T, n2> kernel_point(const std::array<T, n1>& x1, int branch, std::span<const double> free) const {
    require_arity<kernel_arity>(free, name);
    const math::Vec3<T> ez{T(0.0), T(0.0), T(1.0)}, ey{T(0.0), T(1.0), T(0.0)};
    const auto qz = math::Quaternion<T>::from_axis_angle(ez, x1[1]);
    const auto qy = math::Quaternion<T>::from_axis_angle(ey, M_PI / 2.0 - x1[0] - branch * M_PI);
    const auto qpsi = math::Quaternion<T>::from_axis_angle(ez, T(free[0]));
    const auto q = qz * qy * qpsi;
    return {q.w, q.v[0], q.v[1], q.v[2], T(free[1]), T(free[2]), T(free[3])};
  }

  template <class T>
  void renormalize(std::array<T, n>& x) const {
    using std::sqrt;
    const T nrm = sqrt(x[4] * x[4] + x[5] * x[5] + x[6] * x[6] + x[7] * x[7]);
    for (std::size_t i = 4; i < 8; ++i) x[i] = x[i] / nrm;
  }

  static std::array<double, n1> x1_reference(std::span<const double> ref) { return {ref[0], ref[1], 0.0, 0.0}; }

  /// UAV position on the sphere of radius ell.
  template <class T>
  math::Vec3<T> position(const T& phi, const T& theta) const {
    using std::cos;
    using std::sin;
    return {params.ell * cos(phi) * cos(theta), params.ell * cos(phi) * sin(theta), params.ell * sin(phi)};
  }
};

}  // namespace tvec::plants
