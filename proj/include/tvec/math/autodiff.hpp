#pragma once

// Gradients and Jacobians by forward-mode propagation, one seed direction
// per pass. The callables must be generic over the scalar type:
//   scalar:  T f(const std::vector<T>& z)
//   vector:  void f(const std::vector<T>& z, std::vector<T>& out)

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tvec/math/dual.hpp"

namespace tvec::math {

using Dual1 = Dual<1>;

template <class F>
std::vector<double> gradient(const F& f, std::span<const double> z) {
  std::vector<Dual1> zd(z.begin(), z.end());
  std::vector<double> g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    zd[i].partials[0] = 1.0;
    g[i] = f(zd).partials[0];
    zd[i].partials[0] = 0.0;
  }
  return g;
}

/// Jacobian of a vector field; also returns the value f(z) through `value`.
template <class F>
Eigen::MatrixXd jacobian(const F& f, std::span<const double> z, std::vector<double>* value = nullptr) {
  std::vector<Dual1> zd(z.begin(), z.end());
  std::vector<Dual1> out;
  Eigen::MatrixXd J;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zd[i].partials[0] = 1.0;
    out.clear();
    f(zd, out);
    if (i == 0) {
      J.resize(static_cast<Eigen::Index>(out.size()), static_cast<Eigen::Index>(z.size()));
      if (value) {
        value->resize(out.size());
        for (std::size_t r = 0; r < out.size(); ++r) (*value)[r] = out[r].value;
      }
    }
    for (std::size_t r = 0; r < out.size(); ++r)
      J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = out[r].partials[0];
    zd[i].partials[0] = 0.0;
  }
  if (z.empty() && value) {
    std::vector<double> zz;
    value->clear();
    f(zz, *value);
  }
  return J;
}

/// Central finite-difference gradient; test oracle for gradient().
template <class F>
std::vector<double> central_difference_gradient(const F& f, std::span<const double> z, double step = 1e-6) {
  std::vector<double> zz(z.begin(), z.end());
  std::vector<double> g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double orig = zz[i];
    zz[i] = orig + step;
    const double fp = f(zz);
    zz[i] = orig - step;
    const double fm = f(zz);
    zz[i] = orig;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace tvec::math
