#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tvec/math/dual.hpp"
#include "tvec/math/errors.hpp"

namespace tvec::math {

/// Gaussian bell weight: kappa_p * exp(-x^2 / kappa_w).
struct BellParams {
  double kappa_p = 1.0;
  double kappa_w = 1.0;

  void validate() const {
    if (!(kappa_w > 0.0)) throw std::invalid_argument("bell: kappa_w must be > 0");
    if (!(kappa_p >= 0.0)) throw std::invalid_argument("bell: kappa_p must be >= 0");
  }
};

template <class T>
T bell(const T& x, const BellParams& p) {
  using std::exp;
  return p.kappa_p * exp(-(x * x) / p.kappa_w);
}

/// Bell weight evaluated on a squared argument, avoiding sqrt at the origin.
template <class T>
T bell_of_squared(const T& x2, const BellParams& p) {
  using std::exp;
  return p.kappa_p * exp(-x2 / p.kappa_w);
}

template <class T, std::size_t N>
std::array<T, N> axpy(const std::array<T, N>& x, double a, const std::array<T, N>& y) {
  std::array<T, N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = x[i] + a * y[i];
  return r;
}

/// One classical fourth-order Runge-Kutta step with the input held constant.
/// `field(x, u)` returns the state derivative. Non-finite derivatives raise
/// NumericError carrying the state where the step started.
template <class Field, class T, std::size_t N, std::size_t M>
std::array<T, N> rk4_step(const Field& field, const std::array<T, N>& x, const std::array<T, M>& u,
                          double h) {
  if (!(h > 0.0)) throw std::invalid_argument("rk4_step: step must be positive");
  const std::array<T, N> k1 = field(x, u);
  const std::array<T, N> k2 = field(axpy(x, 0.5 * h, k1), u);
  const std::array<T, N> k3 = field(axpy(x, 0.5 * h, k2), u);
  const std::array<T, N> k4 = field(axpy(x, h, k3), u);
  std::array<T, N> out;
  const double h6 = h / 6.0;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = x[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!finite(out[i])) {
      std::vector<double> s(N);
      for (std::size_t j = 0; j < N; ++j) s[j] = value_of(x[j]);
      std::ostringstream msg;
      msg << "rk4_step: non-finite derivative in state component " << i;
      throw NumericError(msg.str(), std::move(s));
    }
  }
  return out;
}

}  // namespace tvec::math
