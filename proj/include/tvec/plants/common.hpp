#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvec/math/autodiff.hpp"
#include "tvec/math/errors.hpp"
#include "tvec/math/integrate.hpp"

namespace tvec::plants {

inline constexpr double kDefaultGravity = 9.81;

/// Element-wise box on the stacked input u = [u1; u2].
template <std::size_t M>
struct InputBounds {
  std::array<double, M> lower{};
  std::array<double, M> upper{};

  void validate() const {
    for (std::size_t i = 0; i < M; ++i)
      if (!(lower[i] < upper[i])) {
        std::ostringstream msg;
        msg << "input bounds: u_min[" << i << "] must be < u_max[" << i << "]";
        throw std::invalid_argument(msg.str());
      }
  }
  bool contains(std::span<const double> u) const {
    for (std::size_t i = 0; i < M; ++i)
      if (u[i] < lower[i] || u[i] > upper[i]) return false;
    return true;
  }
  std::array<double, M> midpoint() const {
    std::array<double, M> r;
    for (std::size_t i = 0; i < M; ++i) r[i] = 0.5 * (lower[i] + upper[i]);
    return r;
  }
};

/// Shape and evaluator contract shared by the three plant models.
template <class P>
concept PlantModel = requires(const P& p, std::array<double, P::n>& x) {
  { P::n1 } -> std::convertible_to<std::size_t>;
  { P::n2 } -> std::convertible_to<std::size_t>;
  { P::m1 } -> std::convertible_to<std::size_t>;
  { P::m2 } -> std::convertible_to<std::size_t>;
  { P::m_eff } -> std::convertible_to<std::size_t>;
  { P::kernel_arity } -> std::convertible_to<std::size_t>;
  { P::reference_dim } -> std::convertible_to<std::size_t>;
  { p.bounds } -> std::convertible_to<InputBounds<P::m>>;
  p.renormalize(x);
  {
    p.f1(std::array<double, P::n1>{}, std::array<double, P::n2>{}, std::array<double, P::m1>{})
  } -> std::same_as<std::array<double, P::n1>>;
  { p.f2(std::array<double, P::n2>{}, std::array<double, P::m2>{}) } -> std::same_as<std::array<double, P::n2>>;
};

template <class P, class T>
using StateOf = std::array<T, P::n>;
template <class P, class T>
using InputOf = std::array<T, P::m>;

template <std::size_t A, std::size_t B, class T>
std::array<T, B> slice(const auto& x) {
  std::array<T, B> r;
  for (std::size_t i = 0; i < B; ++i) r[i] = x[A + i];
  return r;
}

/// Stacked vector field Gamma(x, u) = [f(x1, x2, u1); g(x2, u2)].
template <class P, class T>
StateOf<P, T> dynamics(const P& plant, const StateOf<P, T>& x, const InputOf<P, T>& u) {
  const auto x1 = slice<0, P::n1, T>(x);
  const auto x2 = slice<P::n1, P::n2, T>(x);
  const auto u1 = slice<0, P::m1, T>(u);
  const auto u2 = slice<P::m1, P::m2, T>(u);
  const auto d1 = plant.f1(x1, x2, u1);
  const auto d2 = plant.f2(x2, u2);
  StateOf<P, T> dx;
  for (std::size_t i = 0; i < P::n1; ++i) dx[i] = d1[i];
  for (std::size_t i = 0; i < P::n2; ++i) dx[P::n1 + i] = d2[i];
  return dx;
}

template <class P, class T>
std::array<T, P::m_eff> effective_control(const P& plant, const StateOf<P, T>& x, const InputOf<P, T>& u) {
  return plant.effective_control(slice<0, P::n1, T>(x), slice<P::n1, P::n2, T>(x), slice<0, P::m1, T>(u));
}

/// One RK4 step of the plant followed by the model's state renormalization.
template <class P, class T>
StateOf<P, T> step(const P& plant, const StateOf<P, T>& x, const InputOf<P, T>& u, double h) {
  auto field = [&plant](const StateOf<P, T>& xs, const InputOf<P, T>& us) { return dynamics(plant, xs, us); };
  StateOf<P, T> next = math::rk4_step(field, x, u, h);
  plant.renormalize(next);
  return next;
}

template <class P>
void check_overactuation() {
  static_assert(P::m1 + P::n2 > P::m_eff, "plant must be overactuated: m1 + n2 > dim(effective control)");
}

struct LinearizedSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::vector<double> x_bar;
  std::vector<double> u_bar;
};

inline constexpr double kEquilibriumTolerance = 1e-8;

/// Jacobians of the stacked field at (x_bar, u_bar), by forward-mode propagation.
template <PlantModel P>
LinearizedSystem linearize(const P& plant, const StateOf<P, double>& x_bar, const InputOf<P, double>& u_bar) {
  const auto gamma = dynamics(plant, x_bar, u_bar);
  double residual = 0.0;
  for (double v : gamma) residual = std::max(residual, std::abs(v));
  if (residual > kEquilibriumTolerance) {
    std::ostringstream msg;
    msg << "linearize: point is not an equilibrium (|Gamma|_inf = " << residual << ")";
    throw EquilibriumError(msg.str(), residual);
  }
  std::vector<double> xu(P::n + P::m);
  for (std::size_t i = 0; i < P::n; ++i) xu[i] = x_bar[i];
  for (std::size_t i = 0; i < P::m; ++i) xu[P::n + i] = u_bar[i];
  auto stacked = [&plant](const auto& z, auto& out) {
    using T = typename std::decay_t<decltype(z)>::value_type;
    StateOf<P, T> xs;
    InputOf<P, T> us;
    for (std::size_t i = 0; i < P::n; ++i) xs[i] = z[i];
    for (std::size_t i = 0; i < P::m; ++i) us[i] = z[P::n + i];
    const auto d = dynamics(plant, xs, us);
    out.assign(d.begin(), d.end());
  };
  const Eigen::MatrixXd J = math::jacobian(stacked, xu);
  LinearizedSystem lin;
  lin.A = J.leftCols(static_cast<Eigen::Index>(P::n));
  lin.B = J.rightCols(static_cast<Eigen::Index>(P::m));
  lin.x_bar.assign(x_bar.begin(), x_bar.end());
  lin.u_bar.assign(u_bar.begin(), u_bar.end());
  return lin;
}

/// [B, AB, ..., A^{n-1} B]
inline Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd C(n, n * B.cols());
  Eigen::MatrixXd block = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    C.middleCols(k * B.cols(), B.cols()) = block;
    block = A * block;
  }
  return C;
}

/// Numerical rank of the controllability matrix. Nonzero columns are scaled
/// to unit norm before the SVD; singular values below sigma_max * 1e-9 are
/// treated as zero.
inline int controllability_rank(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double rel_tol = 1e-9) {
  Eigen::MatrixXd C = controllability_matrix(A, B);
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    const double nrm = C.col(j).norm();
    if (nrm > 0.0) C.col(j) /= nrm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > s(0) * rel_tol) ++rank;
  return rank;
}

inline int controllability_rank(const LinearizedSystem& lin) { return controllability_rank(lin.A, lin.B); }

template <std::size_t N>
void require_arity(std::span<const double> free, const char* model) {
  if (free.size() != N) {
    std::ostringstream msg;
    msg << model << ": kernel family expects " << N << " free parameters, got " << free.size();
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace tvec::plants
