#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tvec/math/autodiff.hpp"
#include "tvec/math/integrate.hpp"
#include "tvec/math/rotation.hpp"

using namespace tvec;
using namespace tvec::math;

namespace {

Quaternion<double> random_unit_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return normalize(Quaternion<double>{n(rng), {n(rng), n(rng), n(rng)}});
}

}  // namespace

TEST(Rotation, IdentityQuaternionGivesIdentityMatrix) {
  const auto R = quat_to_rotation(Quaternion<double>::identity());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(R[i][j], i == j ? 1.0 : 0.0);
}

TEST(Rotation, QuarterTurnAboutX) {
  const Quaternion<double> q{M_SQRT1_2, {M_SQRT1_2, 0.0, 0.0}};
  const auto v = rotate(q, Vec3<double>{0.0, 0.0, 1.0});
  EXPECT_NEAR(v[0], 0.0, 1e-15);
  EXPECT_NEAR(v[1], -1.0, 1e-15);
  EXPECT_NEAR(v[2], 0.0, 1e-15);
}

TEST(Rotation, RandomQuaternionsAreOrthonormal) {
  std::mt19937_64 rng(1);
  for (int s = 0; s < 100; ++s) {
    const auto R = quat_to_rotation(random_unit_quaternion(rng));
    const auto P = matmul(R, transpose(R));
    double fro = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) fro += std::pow(P[i][j] - (i == j ? 1.0 : 0.0), 2);
    EXPECT_LT(std::sqrt(fro), 1e-10);
    EXPECT_NEAR(determinant(R), 1.0, 1e-10);
  }
}

TEST(Rotation, NonUnitQuaternionRejected) {
  EXPECT_THROW(quat_to_rotation(Quaternion<double>{1.0, {0.1, 0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(normalize(Quaternion<double>{0.0, {0.0, 0.0, 0.0}}), std::invalid_argument);
}

TEST(Rotation, BodyZAxisMatchesThirdColumn) {
  std::mt19937_64 rng(2);
  for (int s = 0; s < 20; ++s) {
    const auto q = random_unit_quaternion(rng);
    const auto R = quat_to_rotation(q);
    const auto z = body_z_axis(q);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(z[i], R[i][2], 1e-14);
  }
}

TEST(Rotation, InverseRoundTripAllBranches) {
  std::mt19937_64 rng(3);
  // include rotations near pi about each axis to hit every Shepperd branch
  std::vector<Quaternion<double>> qs{{0.0, {1.0, 0.0, 0.0}}, {0.0, {0.0, 1.0, 0.0}}, {0.0, {0.0, 0.0, 1.0}}};
  for (int s = 0; s < 50; ++s) qs.push_back(random_unit_quaternion(rng));
  for (const auto& q : qs) {
    const auto R = quat_to_rotation(q);
    const auto back = rotation_to_quat(R);
    EXPECT_GE(back.w, 0.0);
    const auto R2 = quat_to_rotation(back);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(R[i][j], R2[i][j], 1e-12);
  }
}

TEST(Skew, ZeroAndUnitX) {
  const auto Z = skew(Vec3<double>{0, 0, 0});
  for (const auto& row : Z)
    for (double v : row) EXPECT_EQ(v, 0.0);
  const auto S = skew(Vec3<double>{1, 0, 0});
  const double expected[3][3] = {{0, 0, 0}, {0, 0, -1}, {0, 1, 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(S[i][j], expected[i][j]);
}

TEST(Skew, MatchesCrossProduct) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int s = 0; s < 50; ++s) {
    const Vec3<double> v{u(rng), u(rng), u(rng)}, w{u(rng), u(rng), u(rng)};
    const auto a = matvec(skew(v), w);
    const auto b = cross(v, w);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
  }
}

TEST(QuaternionKinematics, SpinAboutBodyZ) {
  const auto qd = quat_derivative(Quaternion<double>::identity(), Vec3<double>{0, 0, 1});
  EXPECT_EQ(qd.w, 0.0);
  EXPECT_EQ(qd.v[0], 0.0);
  EXPECT_EQ(qd.v[1], 0.0);
  EXPECT_EQ(qd.v[2], 0.5);
}

TEST(WrapAngle, Range) {
  EXPECT_NEAR(wrap_angle(3.0 * M_PI), M_PI, 1e-12);
  EXPECT_NEAR(wrap_angle(-M_PI), M_PI, 1e-12);
  EXPECT_NEAR(wrap_angle(0.25), 0.25, 1e-15);
  EXPECT_NEAR(wrap_angle(2.0 * M_PI + 0.25), 0.25, 1e-12);
}

TEST(Bell, PeakAndUnitWidth) {
  EXPECT_DOUBLE_EQ(bell(0.0, BellParams{3.0, 1.0}), 3.0);
  EXPECT_NEAR(bell(1.0, BellParams{1.0, 1.0}), 0.367879441171, 1e-12);
  EXPECT_DOUBLE_EQ(bell_of_squared(4.0, BellParams{2.0, 0.5}), bell(2.0, BellParams{2.0, 0.5}));
}

TEST(Bell, RejectsBadParameters) {
  EXPECT_THROW((BellParams{1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((BellParams{-1.0, 1.0}.validate()), std::invalid_argument);
}

TEST(Rk4, ConstantField) {
  auto field = [](const std::array<double, 2>&, const std::array<double, 0>&) { return std::array<double, 2>{0, 0}; };
  const auto x = rk4_step(field, std::array<double, 2>{1, 2}, std::array<double, 0>{}, 0.1);
  EXPECT_EQ(x[0], 1.0);
  EXPECT_EQ(x[1], 2.0);
}

TEST(Rk4, ExponentialDecay) {
  auto field = [](const std::array<double, 1>& x, const std::array<double, 0>&) { return std::array<double, 1>{-x[0]}; };
  const auto x = rk4_step(field, std::array<double, 1>{1.0}, std::array<double, 0>{}, 0.1);
  EXPECT_NEAR(x[0], std::exp(-0.1), 1e-7);
}

TEST(Rk4, ObservedOrderOnHarmonicOscillator) {
  auto field = [](const std::array<double, 2>& x, const std::array<double, 0>&) {
    return std::array<double, 2>{x[1], -x[0]};
  };
  auto error_at = [&](double h) {
    std::array<double, 2> x{1.0, 0.0};
    const int n = static_cast<int>(std::lround(2.0 / h));
    for (int i = 0; i < n; ++i) x = rk4_step(field, x, std::array<double, 0>{}, h);
    return std::hypot(x[0] - std::cos(2.0), x[1] + std::sin(2.0));
  };
  const double order = std::log2(error_at(0.1) / error_at(0.05));
  EXPECT_GE(order, 3.8);
  EXPECT_LE(order, 4.2);
}

TEST(Rk4, NonFiniteDerivativeCarriesState) {
  auto field = [](const std::array<double, 1>& x, const std::array<double, 0>&) {
    return std::array<double, 1>{1.0 / (x[0] - x[0])};
  };
  try {
    rk4_step(field, std::array<double, 1>{0.5}, std::array<double, 0>{}, 0.1);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    ASSERT_EQ(e.state().size(), 1u);
    EXPECT_EQ(e.state()[0], 0.5);
  }
  EXPECT_THROW(rk4_step(field, std::array<double, 1>{0.5}, std::array<double, 0>{}, 0.0), std::invalid_argument);
}

TEST(Gradient, Quadratic) {
  auto f = [](const auto& z) { return z[0] * z[0] + z[1] * z[1]; };
  const std::vector<double> z{1.0, 2.0};
  const auto g = gradient(f, z);
  EXPECT_DOUBLE_EQ(g[0], 2.0);
  EXPECT_DOUBLE_EQ(g[1], 4.0);
}

TEST(Gradient, SinCos) {
  auto f = [](const auto& z) {
    using std::cos;
    using std::sin;
    return sin(z[0]) * cos(z[1]);
  };
  const std::vector<double> z{0.0, 0.0};
  const auto g = gradient(f, z);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}

TEST(Gradient, RandomPolynomialsAgainstCentralDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-2, 2), pt(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<double, 6> c;
    for (double& v : c) v = coef(rng);
    auto f = [&c](const auto& z) {
      return c[0] * z[0] * z[0] * z[1] + c[1] * z[1] * z[1] * z[1] + c[2] * z[0] * z[2] + c[3] * z[2] * z[2] * z[2] * z[2] +
             c[4] * z[0] + c[5];
    };
    const std::vector<double> z{pt(rng), pt(rng), pt(rng)};
    const auto g = gradient(f, z);
    const auto fd = central_difference_gradient(f, z, 1e-5);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    for (std::size_t i = 0; i < z.size(); ++i)
      EXPECT_LE(std::abs(g[i] - fd[i]) / std::max({std::abs(g[i]), 1e-3 * gmax, 1e-12}), 1e-6);
  }
}

TEST(Gradient, TranscendentalChainRule) {
  // d/dx of exp(sin x) * sqrt(1 + x^2) / (2 + atan(x)), analytic derivative as oracle
  auto f = [](const auto& z) {
    using std::atan;
    using std::exp;
    using std::sin;
    using std::sqrt;
    return exp(sin(z[0])) * sqrt(1.0 + z[0] * z[0]) / (2.0 + atan(z[0]));
  };
  for (double x : {-1.3, 0.0, 0.4, 2.1}) {
    const double s = std::sqrt(1 + x * x), a = 2 + std::atan(x), e = std::exp(std::sin(x));
    const double df = e * std::cos(x) * s / a + e * (x / s) / a - e * s / (a * a) / (1 + x * x);
    EXPECT_NEAR(gradient(f, std::vector<double>{x})[0], df, 1e-13);
  }
}

TEST(Gradient, AbsUsesRightDerivativeAtZero) {
  auto f = [](const auto& z) {
    using std::abs;
    return abs(z[0]);
  };
  EXPECT_EQ(gradient(f, std::vector<double>{0.0})[0], 1.0);
  EXPECT_EQ(gradient(f, std::vector<double>{-2.0})[0], -1.0);
  auto g = [](const auto& z) { return positive_part(z[0]); };
  EXPECT_EQ(gradient(g, std::vector<double>{0.0})[0], 0.0);
  EXPECT_EQ(gradient(g, std::vector<double>{0.3})[0], 1.0);
}

TEST(Jacobian, MatchesAnalytic) {
  auto f = [](const auto& z, auto& out) {
    using std::sin;
    out = {z[0] * z[1], sin(z[0]), z[1] * z[1] * z[1]};
  };
  std::vector<double> val;
  const auto J = jacobian(f, std::vector<double>{0.5, -2.0}, &val);
  ASSERT_EQ(J.rows(), 3);
  ASSERT_EQ(J.cols(), 2);
  EXPECT_DOUBLE_EQ(J(0, 0), -2.0);
  EXPECT_DOUBLE_EQ(J(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(J(1, 0), std::cos(0.5));
  EXPECT_DOUBLE_EQ(J(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(J(2, 1), 12.0);
  EXPECT_DOUBLE_EQ(val[0], -1.0);
}
