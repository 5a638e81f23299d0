#pragma once

// Small fixed-size vector/matrix helpers and unit quaternions.
// Convention: scalar-first (w, v), Hamilton product, R(q) maps body to world.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "tvec/math/dual.hpp"

namespace tvec::math {

template <class T>
using Vec3 = std::array<T, 3>;
template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

template <class T>
Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
template <class T>
Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <class T, class S>
Vec3<T> scale(const Vec3<T>& a, const S& s) {
  return {a[0] * s, a[1] * s, a[2] * s};
}
template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
template <class T>
T norm(const Vec3<T>& a) {
  using std::sqrt;
  return sqrt(dot(a, a));
}

template <class T>
Mat3<T> skew(const Vec3<T>& v) {
  const T z(0.0);
  return {{{z, -v[2], v[1]}, {v[2], z, -v[0]}, {-v[1], v[0], z}}};
}

template <class T>
Vec3<T> matvec(const Mat3<T>& m, const Vec3<T>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

template <class T>
Mat3<T> matmul(const Mat3<T>& a, const Mat3<T>& b) {
  Mat3<T> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s(0.0);
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  return r;
}

template <class T>
Mat3<T> transpose(const Mat3<T>& a) {
  Mat3<T> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
  return r;
}

inline Mat3<double> identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline double determinant(const Mat3<double>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <class T = double>
struct Quaternion {
  T w{1.0};
  Vec3<T> v{T(0.0), T(0.0), T(0.0)};

  static Quaternion identity() { return {T(1.0), {T(0.0), T(0.0), T(0.0)}}; }

  /// Rotation by `angle` about the unit vector `axis`.
  static Quaternion from_axis_angle(const Vec3<T>& axis, const T& angle) {
    using std::cos;
    using std::sin;
    const T s = sin(angle * 0.5);
    return {cos(angle * 0.5), scale(axis, s)};
  }

  T squared_norm() const { return w * w + dot(v, v); }
  T norm() const {
    using std::sqrt;
    return sqrt(squared_norm());
  }
  Quaternion conjugate() const { return {w, {-v[0], -v[1], -v[2]}}; }

  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    const Vec3<T> c = cross(a.v, b.v);
    return {a.w * b.w - dot(a.v, b.v),
            {a.w * b.v[0] + b.w * a.v[0] + c[0], a.w * b.v[1] + b.w * a.v[1] + c[1],
             a.w * b.v[2] + b.w * a.v[2] + c[2]}};
  }
};

/// Unit quaternion in the same direction; the zero quaternion is rejected.
template <class T>
Quaternion<T> normalize(const Quaternion<T>& q) {
  const T n = q.norm();
  if (!(value_of(n) > 0.0)) throw std::invalid_argument("cannot normalize the zero quaternion");
  return {q.w / n, {q.v[0] / n, q.v[1] / n, q.v[2] / n}};
}

/// Euler-Rodrigues rotation matrix. The caller guarantees a unit quaternion
/// for Dual arguments; plain doubles are checked to 1e-9.
template <class T>
Mat3<T> quat_to_rotation(const Quaternion<T>& q) {
  if constexpr (std::is_same_v<T, double>) {
    if (std::abs(q.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("quat_to_rotation: quaternion is not unit norm");
  }
  const T& w = q.w;
  const T& x = q.v[0];
  const T& y = q.v[1];
  const T& z = q.v[2];
  return {{{1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)},
           {2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)},
           {2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)}}};
}

/// R(q) * [0, 0, 1]: third column of the rotation matrix.
template <class T>
Vec3<T> body_z_axis(const Quaternion<T>& q) {
  const T& w = q.w;
  const T& x = q.v[0];
  const T& y = q.v[1];
  const T& z = q.v[2];
  return {2.0 * (x * z + w * y), 2.0 * (y * z - w * x), 1.0 - 2.0 * (x * x + y * y)};
}

template <class T>
Vec3<T> rotate(const Quaternion<T>& q, const Vec3<T>& v) {
  return matvec(quat_to_rotation(q), v);
}

/// Inverse Euler-Rodrigues (Shepperd): branch on the largest of
/// {trace, R00, R11, R22}; the result is sign-normalized so w >= 0.
inline Quaternion<double> rotation_to_quat(const Mat3<double>& r) {
  const double tr = r[0][0] + r[1][1] + r[2][2];
  Quaternion<double> q;
  const double cands[4] = {tr, r[0][0], r[1][1], r[2][2]};
  const int k = static_cast<int>(std::max_element(cands, cands + 4) - cands);
  if (k == 0) {
    const double s = std::sqrt(1.0 + tr) * 2.0;
    q.w = 0.25 * s;
    q.v = {(r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s};
  } else if (k == 1) {
    const double s = std::sqrt(1.0 + r[0][0] - r[1][1] - r[2][2]) * 2.0;
    q.w = (r[2][1] - r[1][2]) / s;
    q.v = {0.25 * s, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s};
  } else if (k == 2) {
    const double s = std::sqrt(1.0 - r[0][0] + r[1][1] - r[2][2]) * 2.0;
    q.w = (r[0][2] - r[2][0]) / s;
    q.v = {(r[0][1] + r[1][0]) / s, 0.25 * s, (r[1][2] + r[2][1]) / s};
  } else {
    const double s = std::sqrt(1.0 - r[0][0] - r[1][1] + r[2][2]) * 2.0;
    q.w = (r[1][0] - r[0][1]) / s;
    q.v = {(r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, 0.25 * s};
  }
  if (q.w < 0.0) q = {-q.w, {-q.v[0], -q.v[1], -q.v[2]}};
  return normalize(q);
}

/// Attitude kinematics with body-frame angular velocity: qdot = 1/2 E(q) w,
/// E(q) = [-q_v^T ; q0 I + skew(q_v)].
template <class T>
Quaternion<T> quat_derivative(const Quaternion<T>& q, const Vec3<T>& omega) {
  const Vec3<T> c = cross(q.v, omega);
  return {-0.5 * dot(q.v, omega),
          {0.5 * (q.w * omega[0] + c[0]), 0.5 * (q.w * omega[1] + c[1]),
           0.5 * (q.w * omega[2] + c[2])}};
}

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * M_PI;
  double r = std::fmod(a + M_PI, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - M_PI;
}

}  // namespace tvec::math
