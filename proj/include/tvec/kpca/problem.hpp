#pragma once

// Receding-horizon problem: single shooting with RK4 over piecewise-constant
// inputs, written as a sum of squared residuals so the solver can use
// Gauss-Newton curvature.
//
// Decision vector z = [u_0, ..., u_{N-1}, x2d_free].

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvec/math/autodiff.hpp"
#include "tvec/math/integrate.hpp"
#include "tvec/plants/common.hpp"

namespace tvec::kpca {

enum class KernelMode { off, constant, bell };
enum class Equality { none, unit_quaternion };

inline const char* to_string(KernelMode m) {
  switch (m) {
    case KernelMode::off: return "off";
    case KernelMode::constant: return "constant";
    case KernelMode::bell: return "bell";
  }
  return "?";
}
inline KernelMode kernel_mode_from(const std::string& s) {
  if (s == "off") return KernelMode::off;
  if (s == "constant") return KernelMode::constant;
  if (s == "bell") return KernelMode::bell;
  throw std::invalid_argument("kernel_mode must be off, constant or bell (got '" + s + "')");
}
inline const char* to_string(Equality e) { return e == Equality::none ? "none" : "unit_quaternion"; }
inline Equality equality_from(const std::string& s) {
  if (s == "none") return Equality::none;
  if (s == "unit_quaternion") return Equality::unit_quaternion;
  throw std::invalid_argument("equality must be none or unit_quaternion (got '" + s + "')");
}

/// Soft bound |x[index]| <= limit on predicted states, penalized quadratically.
struct StatePenalty {
  std::size_t index = 0;
  double limit = 0.0;
};

template <class P>
struct KpcaConfig {
  std::array<double, P::n> Q{};
  std::array<double, P::m> R{};
  math::BellParams bell{0.0, 1.0};
  double Ts = 0.1;
  int N = 10;
  KernelMode kernel_mode = KernelMode::off;
  int kernel_branch = 0;
  std::vector<double> kernel_free = std::vector<double>(P::kernel_arity, 0.0);
  std::vector<std::size_t> x2d_mask{0};
  Equality equality = Equality::none;
  std::vector<StatePenalty> state_penalties;
  double state_penalty_weight = 1e4;

  void validate() const {
    for (double q : Q)
      if (!(q >= 0.0)) throw std::invalid_argument("kpca: Q weights must be >= 0");
    for (double r : R)
      if (!(r >= 0.0)) throw std::invalid_argument("kpca: R weights must be >= 0");
    bell.validate();
    if (!(Ts > 0.0)) throw std::invalid_argument("kpca: Ts must be > 0");
    if (N < 1) throw std::invalid_argument("kpca: N must be >= 1");
    if (kernel_mode == KernelMode::off && bell.kappa_p != 0.0)
      throw std::invalid_argument("kpca: kernel_mode = off requires kappa_p = 0");
    if (kernel_free.size() != P::kernel_arity) {
      std::ostringstream msg;
      msg << "kpca: kernel_free needs " << P::kernel_arity << " values for " << P::name;
      throw std::invalid_argument(msg.str());
    }
    for (std::size_t i = 0; i < x2d_mask.size(); ++i) {
      if (x2d_mask[i] >= P::n2) throw std::invalid_argument("kpca: x2d_mask index out of range");
      if (i > 0 && x2d_mask[i] <= x2d_mask[i - 1])
        throw std::invalid_argument("kpca: x2d_mask must be strictly increasing");
    }
    if (equality == Equality::unit_quaternion) {
      if (P::n2 < 4 || x2d_mask.size() < 4 || x2d_mask[0] != 0 || x2d_mask[3] != 3)
        throw std::invalid_argument("kpca: unit_quaternion equality needs x2d_mask to start with 0, 1, 2, 3");
    }
    for (const auto& sp : state_penalties)
      if (sp.index >= P::n || !(sp.limit > 0.0)) throw std::invalid_argument("kpca: invalid state penalty");
    if (!(state_penalty_weight >= 0.0)) throw std::invalid_argument("kpca: state_penalty_weight must be >= 0");
  }
};

template <plants::PlantModel P>
class KpcaProblem {
 public:
  using State = plants::StateOf<P, double>;
  using Input = plants::InputOf<P, double>;

  KpcaProblem(const P& plant, const KpcaConfig<P>& cfg, const State& x0, const std::array<double, P::n1>& x1_d,
              const Input& u_prev)
      : plant_(plant), cfg_(cfg), x0_(x0), x1_d_(x1_d), u_prev_(u_prev) {
    cfg_.validate();
    const std::size_t nu = static_cast<std::size_t>(cfg_.N) * P::m;
    lower_.assign(dim(), -std::numeric_limits<double>::infinity());
    upper_.assign(dim(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < nu; ++i) {
      lower_[i] = plant_.bounds.lower[i % P::m];
      upper_[i] = plant_.bounds.upper[i % P::m];
    }
  }

  std::size_t dim() const { return static_cast<std::size_t>(cfg_.N) * P::m + cfg_.x2d_mask.size(); }
  std::size_t input_count() const { return static_cast<std::size_t>(cfg_.N) * P::m; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const KpcaConfig<P>& config() const { return cfg_; }
  const P& plant() const { return plant_; }
  bool has_equality() const { return cfg_.equality != Equality::none; }

  /// Full allocated set-point: decision components from z, the rest fixed at 0.
  template <class T>
  std::array<T, P::n2> x2d(const std::vector<T>& z) const {
    std::array<T, P::n2> out;
    out.fill(T(0.0));
    const std::size_t off = input_count();
    for (std::size_t i = 0; i < cfg_.x2d_mask.size(); ++i) out[cfg_.x2d_mask[i]] = z[off + i];
    return out;
  }

  template <class T>
  void residuals(const std::vector<T>& z, std::vector<T>& r) const {
    using std::exp;
    r.clear();
    const double Ts = cfg_.Ts;
    const auto xd2 = x2d(z);
    plants::StateOf<P, T> x;
    for (std::size_t i = 0; i < P::n; ++i) x[i] = T(x0_[i]);
    plants::InputOf<P, T> u_last;
    for (std::size_t j = 0; j < P::m; ++j) u_last[j] = T(u_prev_[j]);

    const double sqrt_kp = std::sqrt(Ts * cfg_.bell.kappa_p);
    for (int k = 0; k < cfg_.N; ++k) {
      plants::InputOf<P, T> u;
      for (std::size_t j = 0; j < P::m; ++j) u[j] = z[static_cast<std::size_t>(k) * P::m + j];

      for (std::size_t i = 0; i < P::n1; ++i)
        if (cfg_.Q[i] > 0.0) r.push_back(std::sqrt(Ts * cfg_.Q[i]) * (x[i] - x1_d_[i]));
      for (std::size_t i = 0; i < P::n2; ++i)
        if (cfg_.Q[P::n1 + i] > 0.0) r.push_back(std::sqrt(Ts * cfg_.Q[P::n1 + i]) * (x[P::n1 + i] - xd2[i]));
      for (std::size_t j = 0; j < P::m; ++j)
        if (cfg_.R[j] > 0.0) r.push_back(std::sqrt(Ts * cfg_.R[j]) / Ts * (u[j] - u_last[j]));

      if (cfg_.kernel_mode != KernelMode::off) {
        const auto x1 = plants::slice<0, P::n1, T>(x);
        T w(sqrt_kp);
        if (cfg_.kernel_mode == KernelMode::bell) {
          const auto ut = plants::effective_control(plant_, x, u);
          T s2(0.0);
          for (const auto& c : ut) s2 += c * c;
          w = sqrt_kp * exp(-s2 / (2.0 * cfg_.bell.kappa_w));
        }
        const auto K = plant_.kernel_point(x1, cfg_.kernel_branch, cfg_.kernel_free);
        for (std::size_t i = 0; i < P::n2; ++i) r.push_back(w * (xd2[i] - K[i]));
      }

      x = plants::step(plant_, x, u, Ts);
      if (cfg_.state_penalty_weight > 0.0)
        for (const auto& sp : cfg_.state_penalties) {
          using std::abs;
          r.push_back(std::sqrt(cfg_.state_penalty_weight) * math::positive_part(abs(x[sp.index]) - sp.limit));
        }
      u_last = u;
    }
  }

  template <class T>
  T objective_t(const std::vector<T>& z) const {
    std::vector<T> r;
    residuals(z, r);
    T f(0.0);
    for (const auto& v : r) f += v * v;
    return f;
  }
  double objective(const std::vector<double>& z) const { return objective_t(z); }

  /// Pi(x2d) = ||q_d|| - 1 on the first four decision set-point components.
  template <class T>
  T equality(const std::vector<T>& z) const {
    using std::sqrt;
    if (!has_equality()) return T(0.0);
    const std::size_t off = input_count();
    T s(0.0);
    for (std::size_t i = 0; i < 4; ++i) s += z[off + i] * z[off + i];
    return sqrt(s) - 1.0;
  }

  /// Exact feasibility restoration applied to returned solutions.
  void project(std::vector<double>& z) const {
    if (cfg_.equality != Equality::unit_quaternion) return;
    const std::size_t off = input_count();
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += z[off + i] * z[off + i];
    const double n = std::sqrt(s);
    if (n > 0.0)
      for (std::size_t i = 0; i < 4; ++i) z[off + i] /= n;
  }

  /// Predicted states x_0..x_N under the inputs in z.
  std::vector<State> predict(const std::vector<double>& z) const {
    std::vector<State> xs{x0_};
    for (int k = 0; k < cfg_.N; ++k) {
      Input u;
      for (std::size_t j = 0; j < P::m; ++j) u[j] = z[static_cast<std::size_t>(k) * P::m + j];
      xs.push_back(plants::step(plant_, xs.back(), u, cfg_.Ts));
    }
    return xs;
  }

  const State& x0() const { return x0_; }
  const Input& u_prev() const { return u_prev_; }

 private:
  P plant_;
  KpcaConfig<P> cfg_;
  State x0_;
  std::array<double, P::n1> x1_d_;
  Input u_prev_;
  std::vector<double> lower_, upper_;
};

struct RiddersEstimate {
  long double value;
  long double error;
};

/// Ridders' extrapolated central difference of f along one coordinate.
/// Starts at step h0 and shrinks by 1.4 per level, keeping the tableau entry
/// with the smallest error estimate. `noise` is the absolute evaluation
/// error of f; noise / h is added to each estimate so that entries drowned
/// in roundoff are not mistaken for converged ones.
template <class F>
RiddersEstimate ridders_derivative(F&& f, long double h0, long double noise) {
  constexpr int ntab = 12;
  constexpr long double con = 1.4L, con2 = con * con, safe = 2.0L;
  long double a[ntab][ntab];
  long double h = h0, best = 0.0L, err = std::numeric_limits<long double>::max(), extrap = err;
  a[0][0] = (f(h) - f(-h)) / (2.0L * h);
  for (int i = 1; i < ntab; ++i) {
    h /= con;
    a[0][i] = (f(h) - f(-h)) / (2.0L * h);
    long double fac = con2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0L);
      fac *= con2;
      const long double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= extrap) extrap = e;
      if (e + noise / h <= err) {
        err = e + noise / h;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= safe * extrap) break;
  }
  return {best, err};
}

/// Max component-wise relative disagreement between the forward-mode
/// gradient of the objective and a finite-difference oracle: Ridders'
/// extrapolation in long double, from starting steps 1e-2 down to 1e-8
/// (relative to max(1, |z_i|)), keeping the estimate with the smallest
/// extrapolation-plus-roundoff error. Stiff inputs (tiny inertias) put the
/// best step of different components decades apart, and costs near 1e9
/// defeat plain double differences. Components below 1e-8 of the
/// largest one are compared against that floor instead of their own size.
template <class Problem>
double cost_gradient_check(const Problem& problem, const std::vector<double>& z) {
  auto f = [&problem](const auto& zz) { return problem.objective_t(zz); };
  const std::vector<double> g = math::gradient(f, z);
  std::vector<long double> zz(z.begin(), z.end());
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto along = [&](long double dz) {
      zz[i] = static_cast<long double>(z[i]) + dz;
      const long double v = problem.objective_t(zz);
      zz[i] = z[i];
      return v;
    };
    const long double scale = std::max(1.0L, std::abs(static_cast<long double>(z[i])));
    const long double noise = 10.0L * std::numeric_limits<long double>::epsilon() * std::abs(along(0.0L));
    RiddersEstimate best{0.0L, std::numeric_limits<long double>::max()};
    for (long double h0 = 1e-2L; h0 >= 1e-8L; h0 /= 10.0L) {
      const RiddersEstimate e = ridders_derivative(along, h0 * scale, noise);
      if (e.error < best.error) best = e;
    }
    const double fd = static_cast<double>(best.value);
    const double denom = std::max({std::abs(g[i]), std::abs(fd), 1e-8 * gmax, 1e-300});
    worst = std::max(worst, std::abs(g[i] - fd) / denom);
  }
  return worst;
}

}  // namespace tvec::kpca
