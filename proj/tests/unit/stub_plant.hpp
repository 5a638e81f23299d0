#pragma once

// Linear test plant: x1' = gain * u1, x2' = gain * u2 with the effective
// control equal to u1. gain = 0 gives zero dynamics.

#include <array>
#include <span>

#include "tvec/plants/common.hpp"

namespace tvec::test_support {

struct LinearStub {
  static constexpr const char* name = "stub";
  static constexpr std::size_t n1 = 1, n2 = 1, m1 = 1, m2 = 1, m_eff = 1;
  static constexpr std::size_t n = 2, m = 2;
  static constexpr std::size_t kernel_arity = 1;
  static constexpr std::size_t reference_dim = 1;
  static constexpr std::array<const char*, n> state_names{"a", "b"};
  static constexpr std::array<const char*, m> input_names{"u1", "u2"};
  static constexpr std::array<bool, n> angle_state{false, false};
  static constexpr bool quaternion_x2 = false;
  static constexpr std::array<std::size_t, 1> setpoint_components{0};
  static constexpr std::array<std::size_t, 1> reference_states{0};

  double gain = 1.0;
  plants::InputBounds<m> bounds{{-10.0, -10.0}, {10.0, 10.0}};

  template <class T>
  std::array<T, n1> f1(const std::array<T, n1>& x1, const std::array<T, n2>& x2, const std::array<T, m1>& u1) const {
    return {gain * effective_control(x1, x2, u1)[0]};
  }
  template <class T>
  std::array<T, n2> f2(const std::array<T, n2>&, const std::array<T, m2>& u2) const {
    return {gain * u2[0]};
  }
  template <class T>
  std::array<T, m_eff> effective_control(const std::array<T, n1>&, const std::array<T, n2>&,
                                         const std::array<T, m1>& u1) const {
    return {u1[0]};
  }
  template <class T>
  std::array<T, n2> kernel_point(const std::array<T, n1>&, int, std::span<const double> free) const {
    plants::require_arity<kernel_arity>(free, name);
    return {T(free[0])};
  }
  template <class T>
  void renormalize(std::array<T, n>&) const {}
  static std::array<double, n1> x1_reference(std::span<const double> ref) { return {ref[0]}; }
};

static_assert(plants::PlantModel<LinearStub>);

}  // namespace tvec::test_support
