#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tvec/ncc/geodesic.hpp"
#include "tvec/ncc/ncc2d.hpp"

using namespace tvec;
using namespace tvec::ncc;

TEST(Ncc2d, UprightEquilibriumLimit) {
  Ncc2dGains k;
  k.epsilon = 0.4;
  const auto c = ncc2d_step(k, {M_PI / 2, 0, M_PI / 2, 0}, plants::Uav2dParams{});
  EXPECT_NEAR(c.u1_tilde_d, 0.0, 1e-15);
  EXPECT_NEAR(c.beta_d, M_PI / 2, 1e-15);
  EXPECT_NEAR(c.u1, 2.5, 1e-15);
  EXPECT_NEAR(c.u2, 0.0, 1e-15);
}

TEST(Ncc2d, ThrustNeverBelowInverseEpsilon) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  Ncc2dGains k;
  for (int s = 0; s < 200; ++s) {
    const auto c = ncc2d_step(k, {u(rng), u(rng), u(rng), u(rng)}, plants::Uav2dParams{});
    EXPECT_GE(c.u1, 1.0 / k.epsilon - 1e-12);
  }
}

TEST(Ncc2d, AllocationReproducesDemandedEffectiveControl) {
  // u1 * sin(beta_d - alpha) must equal the demanded u1_tilde_d.
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-3, 3);
  const plants::Uav2dParams p;
  const plants::Uav2d plant;
  Ncc2dGains k;
  for (int s = 0; s < 200; ++s) {
    const std::array<double, 4> x{u(rng), u(rng), u(rng), u(rng)};
    const auto c = ncc2d_step(k, x, p);
    const double got = plant.effective_control(std::array<double, 2>{x[0], x[1]}, std::array<double, 2>{c.beta_d, 0.0},
                                               std::array<double, 1>{c.u1})[0];
    EXPECT_NEAR(got, c.u1_tilde_d, 1e-12 * std::max(1.0, std::abs(c.u1_tilde_d)));
  }
}

TEST(Ncc2d, MappingSaturatesAtQuarterTurn) {
  Ncc2dGains k;
  k.kp_alpha = 1e9;  // huge demand drives arctan(eps u) to its asymptote
  const auto c = ncc2d_step(k, {0.0, 0.0, 0.0, 0.0}, plants::Uav2dParams{});
  EXPECT_NEAR(c.beta_d - 0.0, M_PI / 2, 1e-8);
}

TEST(Ncc2d, MappingIsLipschitzInDemand) {
  // |d beta_d / d u| = eps / (1 + eps^2 u^2) <= eps
  Ncc2dGains k;
  const plants::Uav2dParams p;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int s = 0; s < 100; ++s) {
    const std::array<double, 4> a{u(rng), u(rng), 0, 0};
    std::array<double, 4> b = a;
    b[1] += 1e-3;
    const auto ca = ncc2d_step(k, a, p), cb = ncc2d_step(k, b, p);
    EXPECT_LE(std::abs(ca.beta_d - cb.beta_d), k.epsilon * std::abs(ca.u1_tilde_d - cb.u1_tilde_d) + 1e-15);
  }
}

TEST(Ncc2d, GainValidation) {
  Ncc2dGains k;
  k.epsilon = 0.0;
  EXPECT_THROW(k.validate(), std::invalid_argument);
  k = {};
  k.alpha_d = 4.0;
  EXPECT_THROW(k.validate(), std::invalid_argument);
}

TEST(OptimalMapping, SignRule) {
  EXPECT_EQ(optimal_mapping2d(1.0), M_PI / 2);
  EXPECT_EQ(optimal_mapping2d(0.0), M_PI / 2);
  EXPECT_EQ(optimal_mapping2d(-0.5), -M_PI / 2);
}

TEST(OptimalMapping, ThrustIsPerpendicularAndLossless) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2, 2);
  Ncc2dGains k;
  for (int s = 0; s < 100; ++s) {
    const std::array<double, 4> x{u(rng), u(rng), u(rng), u(rng)};
    const auto c = optimal2d_step(k, x, plants::Uav2dParams{});
    EXPECT_NEAR(std::abs(c.beta_d - x[0]), M_PI / 2, 1e-15);
    EXPECT_NEAR(c.u1, std::abs(c.u1_tilde_d), 1e-12);
  }
}

TEST(Geodesic, AtTargetOnlyGravityAndRadialTerms) {
  GeodesicGains k;
  const plants::Uav3dParams p;
  const double phi = 0.6, theta = -0.4;
  const auto pd = sphere_position(p.ell, phi, theta);
  const auto f = geodesic_force(k, {phi, theta, 0, 0}, pd, p);
  const math::Vec3<double> phi_hat{-std::cos(theta) * std::sin(phi), -std::sin(phi) * std::sin(theta), std::cos(phi)};
  const double Tphi = p.g * std::cos(phi) * (p.m_o / 2 + p.m_u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(f.T_d[i], Tphi * phi_hat[i] + k.T_r * pd[i] / p.ell, 1e-12);
  EXPECT_NEAR(f.T, math::norm(f.T_d), 1e-15);
}

TEST(Geodesic, DirectionIsUnitTangentInPlane) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> a(-1.4, 1.4), b(-3.1, 3.1);
  const double ell = 3.0;
  for (int s = 0; s < 100; ++s) {
    const auto p = sphere_position(ell, a(rng), b(rng));
    const auto pd = sphere_position(ell, a(rng), b(rng));
    if (math::norm(math::cross(p, pd)) < 1e-3) continue;
    const auto t = geodesic_direction(p, pd, 1e-9);
    EXPECT_NEAR(math::norm(t), 1.0, 1e-9);
    EXPECT_NEAR(math::dot(t, p), 0.0, 1e-9);
    EXPECT_NEAR(math::dot(t, math::cross(p, pd)), 0.0, 1e-9);
    EXPECT_GT(math::dot(t, pd), 0.0);
  }
}

TEST(Geodesic, DistanceIsArcLength) {
  const double ell = 2.0;
  EXPECT_NEAR(geodesic_distance(sphere_position(ell, 0, 0), sphere_position(ell, 0, M_PI / 2), ell), ell * M_PI / 2, 1e-12);
  EXPECT_NEAR(geodesic_distance(sphere_position(ell, 0, 0), sphere_position(ell, 0, M_PI), ell), ell * M_PI, 1e-7);
}

TEST(Geodesic, SphereVelocityIsPositionDerivative) {
  const double ell = 3.0, phi = 0.3, theta = 1.1, pd = 0.7, td = -0.4, h = 1e-6;
  const auto v = sphere_velocity(ell, phi, theta, pd, td);
  const auto p1 = sphere_position(ell, phi + h * pd, theta + h * td);
  const auto p0 = sphere_position(ell, phi - h * pd, theta - h * td);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(v[i], (p1[i] - p0[i]) / (2 * h), 1e-8);
}

TEST(DesiredQuaternion, VerticalForceGivesIdentity) {
  const auto q = desired_quaternion({0, 0, 4.0}, 0.0);
  EXPECT_EQ(q.w, 1.0);
  for (double v : q.v) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(desired_quaternion({0, 0, 0}, 0.0), std::invalid_argument);
}

TEST(DesiredQuaternion, AlignsBodyZWithForce) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> n(0, 2);
  for (int s = 0; s < 100; ++s) {
    const math::Vec3<double> T{n(rng), n(rng), n(rng)};
    const auto q = desired_quaternion(T, n(rng));
    EXPECT_NEAR(q.norm(), 1.0, 1e-12);
    const auto z = math::rotate(q, math::Vec3<double>{0, 0, 1});
    const double nt = math::norm(T);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(z[i], T[i] / nt, 1e-9);
  }
  const auto down = desired_quaternion({0, 0, -1.0}, 0.0);
  EXPECT_NEAR(math::body_z_axis(down)[2], -1.0, 1e-15);
}

TEST(AttitudeTorque, ZeroErrorAndPureDamping) {
  GeodesicGains k;
  const auto q = math::normalize(math::Quaternion<double>{0.3, {0.1, -0.5, 0.2}});
  const auto t0 = attitude_torque(k, q, q, {0, 0, 0});
  for (double v : t0) EXPECT_NEAR(v, 0.0, 1e-15);
  const auto t1 = attitude_torque(k, q, q, {0.1, 0, 0});
  EXPECT_NEAR(t1[0], -k.kd_q * 0.1, 1e-15);
  EXPECT_NEAR(t1[1], 0.0, 1e-15);
  EXPECT_NEAR(t1[2], 0.0, 1e-15);
}

TEST(AttitudeTorque, ErrorQuaternionRoundTrip) {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> n(0, 1);
  for (int s = 0; s < 100; ++s) {
    const auto q = math::normalize(math::Quaternion<double>{n(rng), {n(rng), n(rng), n(rng)}});
    const auto qd = math::normalize(math::Quaternion<double>{n(rng), {n(rng), n(rng), n(rng)}});
    const auto e = attitude_error(q, qd);
    EXPECT_GE(e.w, 0.0);
    const auto lhs = math::matmul(math::quat_to_rotation(q), math::quat_to_rotation(e));
    const auto rhs = math::quat_to_rotation(qd);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(lhs[i][j], rhs[i][j], 1e-9);
  }
}

TEST(Ncc3d, HoverAtTargetNeedsOnlyGravityAndRadialThrust) {
  GeodesicGains k;
  const plants::Uav3dParams p;
  const double phi = 0.8, theta = 0.2;
  const auto f = geodesic_force(k, {phi, theta, 0, 0}, sphere_position(p.ell, phi, theta), p);
  const auto qd = desired_quaternion(f.T_d, 0.0);
  const std::array<double, 11> x{phi, theta, 0, 0, qd.w, qd.v[0], qd.v[1], qd.v[2], 0, 0, 0};
  const auto c = ncc3d_step(k, x, phi, theta, p);
  EXPECT_NEAR(c.T, f.T, 1e-12);
  for (double v : c.tau) EXPECT_NEAR(v, 0.0, 1e-7);
  // the lever-arm-scaled effective control balances gravity along phi
  const plants::Uav3d plant(p, plants::Uav3d{}.bounds);
  const auto F = plant.effective_control(std::array<double, 4>{phi, theta, 0, 0},
                                         std::array<double, 7>{qd.w, qd.v[0], qd.v[1], qd.v[2], 0, 0, 0},
                                         std::array<double, 1>{c.T});
  EXPECT_NEAR(F[0], plant.gravity(phi), 1e-9);
  EXPECT_NEAR(F[1], 0.0, 1e-9);
}
