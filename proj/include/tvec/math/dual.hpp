#pragma once

// Forward-mode dual numbers. A Dual<W> carries a value and W directional
// derivatives; the solver seeds one direction at a time (W = 1).

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <type_traits>

namespace tvec::math {

template <std::size_t W = 1>
struct Dual {
  double value = 0.0;
  std::array<double, W> partials{};

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT: constants promote implicitly
  constexpr Dual(double v, const std::array<double, W>& d) : value(v), partials(d) {}

  static constexpr Dual seeded(double v, std::size_t direction) {
    Dual r(v);
    r.partials[direction] = 1.0;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    value += o.value;
    for (std::size_t i = 0; i < W; ++i) partials[i] += o.partials[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    for (std::size_t i = 0; i < W; ++i) partials[i] -= o.partials[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r = a;
    r += b;
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r = a;
    r -= b;
    return r;
  }
  friend Dual operator-(const Dual& a) {
    Dual r;
    r.value = -a.value;
    for (std::size_t i = 0; i < W; ++i) r.partials[i] = -a.partials[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.value = a.value * b.value;
    for (std::size_t i = 0; i < W; ++i)
      r.partials[i] = a.partials[i] * b.value + a.value * b.partials[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    r.value = a.value / b.value;
    const double inv = 1.0 / b.value;
    for (std::size_t i = 0; i < W; ++i)
      r.partials[i] = (a.partials[i] - r.value * b.partials[i]) * inv;
    return r;
  }

  friend bool operator<(const Dual& a, const Dual& b) { return a.value < b.value; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.value > b.value; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.value <= b.value; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.value >= b.value; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.value == b.value; }

  friend std::ostream& operator<<(std::ostream& os, const Dual& d) {
    os << d.value << "[";
    for (std::size_t i = 0; i < W; ++i) os << (i ? "," : "") << d.partials[i];
    return os << "]";
  }

 private:
  // chain rule for a unary function with derivative df at value
  friend Dual chain(const Dual& a, double fv, double df) {
    Dual r;
    r.value = fv;
    for (std::size_t i = 0; i < W; ++i) r.partials[i] = df * a.partials[i];
    return r;
  }

 public:
  friend Dual sin(const Dual& a) { return chain(a, std::sin(a.value), std::cos(a.value)); }
  friend Dual cos(const Dual& a) { return chain(a, std::cos(a.value), -std::sin(a.value)); }
  friend Dual tan(const Dual& a) {
    const double t = std::tan(a.value);
    return chain(a, t, 1.0 + t * t);
  }
  friend Dual exp(const Dual& a) {
    const double e = std::exp(a.value);
    return chain(a, e, e);
  }
  friend Dual log(const Dual& a) { return chain(a, std::log(a.value), 1.0 / a.value); }
  friend Dual sqrt(const Dual& a) {
    const double s = std::sqrt(a.value);
    return chain(a, s, 0.5 / s);
  }
  friend Dual atan(const Dual& a) {
    return chain(a, std::atan(a.value), 1.0 / (1.0 + a.value * a.value));
  }
  friend Dual acos(const Dual& a) {
    return chain(a, std::acos(a.value), -1.0 / std::sqrt(1.0 - a.value * a.value));
  }
  friend Dual asin(const Dual& a) {
    return chain(a, std::asin(a.value), 1.0 / std::sqrt(1.0 - a.value * a.value));
  }
  /// |x| with derivative sign(x); at exactly 0 the right-hand derivative (+1) is used.
  friend Dual abs(const Dual& a) { return chain(a, std::abs(a.value), a.value < 0.0 ? -1.0 : 1.0); }
  friend Dual pow(const Dual& a, double p) {
    return chain(a, std::pow(a.value, p), p * std::pow(a.value, p - 1.0));
  }
  friend Dual atan2(const Dual& y, const Dual& x) {
    Dual r;
    r.value = std::atan2(y.value, x.value);
    const double den = x.value * x.value + y.value * y.value;
    for (std::size_t i = 0; i < W; ++i)
      r.partials[i] = (x.value * y.partials[i] - y.value * x.partials[i]) / den;
    return r;
  }
  friend bool isfinite(const Dual& a) {
    if (!std::isfinite(a.value)) return false;
    for (double p : a.partials)
      if (!std::isfinite(p)) return false;
    return true;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <std::size_t W>
struct is_dual<Dual<W>> : std::true_type {};

/// Plain value of a scalar, stripping derivative information.
inline double value_of(double x) { return x; }
template <std::size_t W>
double value_of(const Dual<W>& x) {
  return x.value;
}

inline bool finite(double x) { return std::isfinite(x); }
template <std::size_t W>
bool finite(const Dual<W>& x) {
  return isfinite(x);
}

/// max(0, x) with derivative 0 on the inactive side (including x == 0).
template <class T>
T positive_part(const T& x) {
  return value_of(x) > 0.0 ? x : T(0.0);
}

}  // namespace tvec::math
