#include <array>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "stub_plant.hpp"
#include "tvec/sim/metrics.hpp"
#include "tvec/sim/simulate.hpp"

using namespace tvec;
using namespace tvec::sim;

namespace {

class ZeroController : public Controller<test_support::LinearStub> {
 public:
  ControlOutput<test_support::LinearStub> compute(const std::array<double, 2>&, std::span<const double>) override {
    return {};
  }
};

std::vector<double> grid(double t_end, double dt) {
  std::vector<double> t;
  const int n = static_cast<int>(std::lround(t_end / dt));
  for (int i = 0; i <= n; ++i) t.push_back(i * dt);
  return t;
}

StepSchedule constant_schedule(double v) {
  StepSchedule s;
  s.times = {0.0};
  s.values = {{v}};
  return s;
}

}  // namespace

TEST(RunScenario, ZeroDynamicsStub) {
  test_support::LinearStub plant;
  plant.gain = 0.0;
  ZeroController ctrl;
  const auto log = run_scenario(plant, ctrl, {0.7, -0.2}, constant_schedule(0.0), LoopSettings{1.0, 0.1, 10},
                                KernelChoice{0, {0.0}});
  ASSERT_EQ(log.size(), 11u);
  for (std::size_t k = 0; k < log.size(); ++k) {
    EXPECT_NEAR(log.t[k], 0.1 * static_cast<double>(k), 1e-15);
    EXPECT_EQ(log.x[k][0], 0.7);
    EXPECT_EQ(log.x[k][1], -0.2);
  }
  EXPECT_FALSE(log.failed_at.has_value());
}

TEST(RunScenario, IntegratesUnderZeroOrderHold) {
  // x1' = u1 with a constant u1 = 2 from the stub's controller: x1(t) = x1(0) + 2 t.
  class Constant : public Controller<test_support::LinearStub> {
   public:
    ControlOutput<test_support::LinearStub> compute(const std::array<double, 2>&, std::span<const double>) override {
      ControlOutput<test_support::LinearStub> o;
      o.u = {2.0, 0.0};
      return o;
    }
  } ctrl;
  test_support::LinearStub plant;
  const auto log = run_scenario(plant, ctrl, {1.0, 0.0}, constant_schedule(0.0), LoopSettings{2.0, 0.5, 4},
                                KernelChoice{0, {0.0}});
  ASSERT_EQ(log.size(), 5u);
  for (std::size_t k = 0; k < log.size(); ++k) EXPECT_NEAR(log.x[k][0], 1.0 + 2.0 * log.t[k], 1e-12);
  const auto eff = input_efforts(log);
  EXPECT_NEAR(eff.thrust, 2.0 * 2.0, 1e-12);
  EXPECT_EQ(eff.torque, 0.0);
}

TEST(RunScenario, RejectsBadSettings) {
  test_support::LinearStub plant;
  ZeroController ctrl;
  EXPECT_THROW(run_scenario(plant, ctrl, {0, 0}, constant_schedule(0.0), LoopSettings{1.05, 0.1, 10}, KernelChoice{0, {0.0}}),
               std::invalid_argument);
  StepSchedule bad;
  bad.times = {0.0, 0.0};
  bad.values = {{0.0}, {1.0}};
  EXPECT_THROW(run_scenario(plant, ctrl, {0, 0}, bad, LoopSettings{1.0, 0.1, 10}, KernelChoice{0, {0.0}}),
               std::invalid_argument);
}

TEST(RunScenario, DeterministicAcrossRuns) {
  class Feedback : public Controller<test_support::LinearStub> {
   public:
    ControlOutput<test_support::LinearStub> compute(const std::array<double, 2>& x, std::span<const double> r) override {
      ControlOutput<test_support::LinearStub> o;
      o.u = {-1.3 * (x[0] - r[0]), -0.7 * x[1]};
      o.x2d = {std::sin(x[0])};
      return o;
    }
  };
  test_support::LinearStub plant;
  Feedback a, b;
  StepSchedule s;
  s.times = {0.0, 1.0};
  s.values = {{1.0}, {-2.0}};
  const auto la = run_scenario(plant, a, {0.0, 1.0}, s, LoopSettings{3.0, 0.1, 5}, KernelChoice{0, {0.0}});
  const auto lb = run_scenario(plant, b, {0.0, 1.0}, s, LoopSettings{3.0, 0.1, 5}, KernelChoice{0, {0.0}});
  EXPECT_EQ(la.x, lb.x);
  EXPECT_EQ(la.u, lb.u);
  EXPECT_EQ(la.delta1_rate, lb.delta1_rate);
  EXPECT_EQ(la.reference[5][0], 1.0);
  EXPECT_EQ(la.reference[15][0], -2.0);
}

TEST(Schedule, IntervalLookup) {
  StepSchedule s;
  s.times = {0.0, 15.0, 30.0};
  s.values = {{1}, {2}, {3}};
  s.validate(1);
  EXPECT_EQ(s.interval(0.0), 0u);
  EXPECT_EQ(s.interval(14.999), 0u);
  EXPECT_EQ(s.interval(15.0), 1u);
  EXPECT_EQ(s.interval(100.0), 2u);
  EXPECT_EQ(s.value_at(20.0)[0], 2.0);
  EXPECT_THROW(s.validate(2), std::invalid_argument);
}

TEST(SettlingTime, ConstantSignalSettlesImmediately) {
  const auto t = grid(10.0, 0.1);
  const std::vector<double> y(t.size(), 2.0);
  const auto ts = settling_time(t, y, 2.0, 0.01, 2.0);
  ASSERT_TRUE(ts.has_value());
  EXPECT_EQ(*ts, 0.0);
}

TEST(SettlingTime, ExponentialCrossing) {
  const double dt = 0.01;
  const auto t = grid(10.0, dt);
  std::vector<double> y;
  for (double ti : t) y.push_back(1.0 + std::exp(-ti));
  const auto ts = settling_time(t, y, 1.0, std::exp(-3.0), 2.0);
  ASSERT_TRUE(ts.has_value());
  EXPECT_NEAR(*ts, 3.0, dt);
}

TEST(SettlingTime, SustainedSineNeverSettles) {
  const auto t = grid(20.0, 0.01);
  std::vector<double> y;
  for (double ti : t) y.push_back(0.02 * std::sin(2 * M_PI * ti));
  EXPECT_FALSE(settling_time(t, y, 0.0, 0.01, 2.0).has_value());
}

TEST(SettlingTime, HoldRequirementAndWindow) {
  const auto t = grid(10.0, 0.1);
  std::vector<double> y(t.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] < 9.0 - 1e-9) y[i] = 1.0;
  EXPECT_FALSE(settling_time(t, y, 0.0, 0.01, 2.0).has_value());  // only 1 s of data after settling
  EXPECT_TRUE(settling_time(t, y, 0.0, 0.01, 1.0).has_value());
  const auto in_window = settling_time(t, y, 1.0, 0.01, 2.0, 0.0, 5.0);
  ASSERT_TRUE(in_window.has_value());
  EXPECT_EQ(*in_window, 0.0);
  EXPECT_THROW(settling_time(t, std::vector<double>(3), 0.0, 0.01, 1.0), std::invalid_argument);
}

TEST(Oscillation, ConstantSignal) {
  const auto t = grid(30.0, 0.01);
  const std::vector<double> y(t.size(), 0.5);
  const auto r = oscillation_detect(t, y, 20.0);
  EXPECT_FALSE(r.oscillating);
  EXPECT_EQ(r.peak_count, 0);
}

TEST(Oscillation, SustainedSine) {
  const auto t = grid(10.0, 0.01);
  std::vector<double> y;
  for (double ti : t) y.push_back(std::sin(2 * M_PI * ti));
  const auto r = oscillation_detect(t, y, 10.0);
  EXPECT_TRUE(r.oscillating);
  EXPECT_NEAR(r.peak_count, 10, 1);
}

TEST(Oscillation, DecayingSineIsNotSustained) {
  // Over a 10 s window the last-quarter amplitude is about e^{-7.5} of the first: far below 0.5.
  const auto t = grid(10.0, 0.01);
  std::vector<double> y;
  for (double ti : t) y.push_back(std::exp(-ti) * std::sin(2 * M_PI * ti));
  const auto r = oscillation_detect(t, y, 10.0);
  EXPECT_FALSE(r.oscillating);
}

TEST(Gains, ZeroChannelsGiveZeroGains) {
  TrajectoryLog log;
  log.delta2.assign(40, {0.0});
  log.delta1_rate.assign(40, {0.0});
  const auto g = estimate_gains(log, 0.5);
  EXPECT_EQ(g.gain1, 0.0);
  EXPECT_EQ(g.gain2, 0.0);
  EXPECT_EQ(g.product(), 0.0);
}

TEST(Gains, ConstructedRatio) {
  TrajectoryLog log;
  for (int k = 0; k < 100; ++k) {
    const double d = 1.0 + std::sin(0.3 * k);
    log.delta2.push_back({d, -0.5 * d});
    log.delta1_rate.push_back({0.5 * d, -0.25 * d});
  }
  const auto g = estimate_gains(log, 0.5);
  EXPECT_NEAR(g.gain1, 0.5, 1e-9);
  EXPECT_NEAR(g.gain2, 2.0, 1e-9);
  EXPECT_NEAR(g.product(), 1.0, 1e-9);
  EXPECT_THROW(estimate_gains(log, 0.0), std::invalid_argument);
  EXPECT_THROW(estimate_gains(log, 0.05), std::invalid_argument);
}

TEST(KernelDistance, NccMappingDistanceIsArctan) {
  // beta_d = arctan(eps u) + alpha and K_0 = [alpha, 0]: the logged distance
  // is |arctan(eps u)|, recomputed here from the logged state.
  const plants::Uav2d plant;
  ncc::Ncc2dGains k;
  k.kp_beta = 25.0;
  k.kd_beta = 10.0;
  Ncc2dController ctrl(plant.params, k);
  const auto log = run_scenario(plant, ctrl, {0.0, 0.0, M_PI / 6, 0.0}, [] {
    StepSchedule s;
    s.times = {0.0};
    s.values = {{M_PI / 2}};
    return s;
  }(), LoopSettings{5.0, 0.01, 5}, KernelChoice{0, {0.0}});
  ASSERT_FALSE(log.failed_at.has_value());
  const auto& kd = kernel_distance_series(log);
  const double mg = plant.params.m_tilde() * plant.params.g;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& x = log.x[i];
    const double u = k.kp_alpha * (M_PI / 2 - x[0]) - k.kd_alpha * x[1] + mg * std::cos(x[0]);
    EXPECT_NEAR(kd[i], std::abs(std::atan(k.epsilon * u)), 1e-12);
    EXPECT_LE(kd[i], M_PI / 2);
  }
}

TEST(KernelDistance, ZeroWhenSetPointOnKernel) {
  class OnKernel : public Controller<test_support::LinearStub> {
   public:
    ControlOutput<test_support::LinearStub> compute(const std::array<double, 2>&, std::span<const double>) override {
      ControlOutput<test_support::LinearStub> o;
      o.x2d = {0.25};
      return o;
    }
  } ctrl;
  test_support::LinearStub plant;
  const auto log = run_scenario(plant, ctrl, {0.0, 0.0}, constant_schedule(0.0), LoopSettings{1.0, 0.1, 1},
                                KernelChoice{0, {0.25}});
  for (double d : kernel_distance_series(log)) EXPECT_EQ(d, 0.0);
  TrajectoryLog empty;
  EXPECT_THROW(kernel_distance_series(empty), std::invalid_argument);
}

TEST(Channels, LookupByName) {
  test_support::LinearStub plant;
  ZeroController ctrl;
  const auto log = run_scenario(plant, ctrl, {0.5, 0.0}, constant_schedule(1.0), LoopSettings{1.0, 0.1, 1},
                                KernelChoice{0, {0.0}});
  EXPECT_EQ(channel(log, "a")[3], 0.5);
  EXPECT_EQ(channel(log, "u2")[0], 0.0);
  EXPECT_EQ(channel(log, "delta2_0").size(), log.size());
  EXPECT_THROW(channel(log, "nope"), std::invalid_argument);
  const auto e = tracking_error(log, 0);
  EXPECT_NEAR(e[4], -0.5, 1e-15);
  EXPECT_THROW(tracking_error(log, 1), std::invalid_argument);
}

TEST(Saturate, ClampsEachInput) {
  const plants::InputBounds<2> b{{0.0, -0.2}, {5.0, 0.2}};
  const auto u = saturate(std::array<double, 2>{7.0, -0.5}, b);
  EXPECT_EQ(u[0], 5.0);
  EXPECT_EQ(u[1], -0.2);
}
