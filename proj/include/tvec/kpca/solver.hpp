#pragma once

// Box-constrained least-squares NLP solver with one optional scalar equality.
//
// Bounds are handled by a log barrier whose parameter shrinks by 0.2 per
// outer iteration but never below mu_min; the equality by an augmented
// Lagrangian. Steps are Levenberg-damped Gauss-Newton steps on the merit
//   F(z) + lambda c(z) + rho/2 c(z)^2 - mu sum(log slacks)
// with a fraction-to-boundary rule and Armijo backtracking.
//
// Problem interface:
//   dim(), lower(), upper(), has_equality()
//   residuals<T>(z, r), equality<T>(z), project(z)

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tvec/math/autodiff.hpp"
#include "tvec/math/errors.hpp"

namespace tvec::kpca {

struct SolverOptions {
  int max_iter = 40;
  double mu_min = 0.1;
  double mu_init = 0.1;
  double tol_kkt = 1e-6;
  bool warm_start = true;
  double penalty_eq = 1e3;
  double tol_eq = 1e-8;

  void validate() const {
    if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
    if (!(mu_min > 0.0 && mu_min <= mu_init)) throw std::invalid_argument("solver: need 0 < mu_min <= mu_init");
    if (!(tol_kkt > 0.0)) throw std::invalid_argument("solver: tol_kkt must be > 0");
    if (!(penalty_eq > 0.0)) throw std::invalid_argument("solver: penalty_eq must be > 0");
  }
};

enum class SolverStatus { converged, iteration_cap, numeric_failure };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::iteration_cap: return "iteration_cap";
    case SolverStatus::numeric_failure: return "numeric_failure";
  }
  return "?";
}

struct NlpSolution {
  std::vector<double> z;
  double cost = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  double equality_residual = 0.0;
  double multiplier = 0.0;
  SolverStatus status = SolverStatus::iteration_cap;
};

namespace detail {

inline bool finite_lower(double b) { return b > -std::numeric_limits<double>::infinity(); }
inline bool finite_upper(double b) { return b < std::numeric_limits<double>::infinity(); }

template <class Problem>
struct Evaluation {
  double F = 0.0;
  double c = 0.0;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  Eigen::VectorXd grad_c;
  bool ok = false;
};

template <class Problem>
Evaluation<Problem> evaluate(const Problem& p, const std::vector<double>& z) {
  Evaluation<Problem> e;
  try {
    std::vector<double> rv;
    auto fr = [&p](const auto& zz, auto& out) { p.residuals(zz, out); };
    e.J = math::jacobian(fr, z, &rv);
    e.r = Eigen::Map<const Eigen::VectorXd>(rv.data(), static_cast<Eigen::Index>(rv.size()));
    e.F = e.r.squaredNorm();
    e.grad_c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(z.size()));
    if (p.has_equality()) {
      auto fc = [&p](const auto& zz) { return p.equality(zz); };
      const auto gc = math::gradient(fc, z);
      e.grad_c = Eigen::Map<const Eigen::VectorXd>(gc.data(), static_cast<Eigen::Index>(gc.size()));
      e.c = p.equality(z);
    }
    e.ok = std::isfinite(e.F) && std::isfinite(e.c) && e.J.allFinite() && e.grad_c.allFinite();
  } catch (const NumericError&) {
    e.ok = false;
  }
  return e;
}

template <class Problem>
double objective_value(const Problem& p, const std::vector<double>& z) {
  std::vector<double> r;
  p.residuals(z, r);
  double f = 0.0;
  for (double v : r) f += v * v;
  return f;
}

}  // namespace detail

/// Solve from `init` (projected into the strict interior of the box).
/// `lambda0` seeds the equality multiplier for warm starts.
template <class Problem>
NlpSolution solve(const Problem& p, std::vector<double> init, const SolverOptions& opt, double lambda0 = 0.0) {
  opt.validate();
  const std::size_t d = p.dim();
  if (init.size() != d) throw std::invalid_argument("solve: initial point has wrong dimension");
  const auto& lo = p.lower();
  const auto& hi = p.upper();

  std::vector<double> z = std::move(init);
  for (std::size_t i = 0; i < d; ++i) {
    const bool fl = detail::finite_lower(lo[i]), fu = detail::finite_upper(hi[i]);
    const double push = (fl && fu) ? 1e-6 * (hi[i] - lo[i]) : 1e-6 * std::max(1.0, std::abs(z[i]));
    if (fl) z[i] = std::max(z[i], lo[i] + push);
    if (fu) z[i] = std::min(z[i], hi[i] - push);
  }

  double mu = opt.mu_init;
  double lambda = lambda0;
  const double rho = opt.penalty_eq;
  const double tau = 0.995;
  const double eps = std::numeric_limits<double>::epsilon();

  auto barrier = [&](const std::vector<double>& zz) {
    double b = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (detail::finite_lower(lo[i])) b -= std::log(zz[i] - lo[i]);
      if (detail::finite_upper(hi[i])) b -= std::log(hi[i] - zz[i]);
    }
    return b;
  };
  auto merit_of = [&](double F, double c, const std::vector<double>& zz) {
    return F + lambda * c + 0.5 * rho * c * c + mu * barrier(zz);
  };

  NlpSolution sol;
  auto e = detail::evaluate(p, z);
  if (!e.ok) {
    sol.z = z;
    sol.status = SolverStatus::numeric_failure;
    sol.cost = std::numeric_limits<double>::quiet_NaN();
    sol.multiplier = lambda;
    return sol;
  }

  double damping = 1e-10;
  int it = 0;
  bool converged = false;
  bool stalled = false;
  bool just_updated = false;  // force a step after each barrier/multiplier update
  double err = std::numeric_limits<double>::infinity();
  const Eigen::Index n = static_cast<Eigen::Index>(d);

  while (true) {
    // Gradient of the merit function.
    Eigen::VectorXd g = 2.0 * e.J.transpose() * e.r + (lambda + rho * e.c) * e.grad_c;
    Eigen::VectorXd bdiag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const bool fl = detail::finite_lower(lo[i]), fu = detail::finite_upper(hi[i]);
      if (fl) {
        g(ii) -= mu / (z[i] - lo[i]);
        bdiag(ii) += mu / ((z[i] - lo[i]) * (z[i] - lo[i]));
      }
      if (fu) {
        g(ii) += mu / (hi[i] - z[i]);
        bdiag(ii) += mu / ((hi[i] - z[i]) * (hi[i] - z[i]));
      }
      if (fl && fu) scale(ii) = hi[i] - lo[i];
    }
    // The inner problem (fixed mu, lambda) is solved when the scaled merit
    // gradient vanishes; only then are the barrier and multiplier updated.
    const double inner = g.cwiseProduct(scale).lpNorm<Eigen::Infinity>() / std::max(1.0, e.F);
    const bool eq_ok = !p.has_equality() || std::abs(e.c) <= opt.tol_eq;
    err = std::max(inner, std::abs(e.c));
    if (inner <= opt.tol_kkt && !just_updated) {
      if (mu <= opt.mu_min && eq_ok) {
        converged = true;
        break;
      }
      mu = std::max(opt.mu_min, 0.2 * mu);
      lambda += rho * e.c;
      just_updated = true;
      continue;
    }
    just_updated = false;
    if (inner <= opt.tol_kkt && mu <= opt.mu_min && eq_ok) {
      converged = true;
      break;
    }
    if (it >= opt.max_iter || stalled) break;

    Eigen::MatrixXd H = 2.0 * e.J.transpose() * e.J + rho * e.grad_c * e.grad_c.transpose();
    H.diagonal() += bdiag;
    const double hmax = std::max(H.diagonal().maxCoeff(), 1e-300);

    const double slope_floor = 1e-4;
    bool accepted = false;
    for (int attempt = 0; attempt < 8 && !accepted; ++attempt) {
      Eigen::MatrixXd Hd = H;
      for (Eigen::Index i = 0; i < n; ++i) Hd(i, i) += damping * H(i, i) + 1e-12 * hmax;
      const Eigen::VectorXd dz = Hd.ldlt().solve(-g);
      const double slope = g.dot(dz);
      if (!dz.allFinite() || !(slope < 0.0)) {
        damping = std::max(1e-6, damping * 10.0);
        continue;
      }
      double amax = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double di = dz(static_cast<Eigen::Index>(i));
        if (di < 0.0 && detail::finite_lower(lo[i])) amax = std::min(amax, -tau * (z[i] - lo[i]) / di);
        if (di > 0.0 && detail::finite_upper(hi[i])) amax = std::min(amax, tau * (hi[i] - z[i]) / di);
      }
      const double m0 = merit_of(e.F, e.c, z);
      for (double a = amax; a > 1e-10 * amax; a *= 0.5) {
        std::vector<double> trial(z);
        for (std::size_t i = 0; i < d; ++i) trial[i] += a * dz(static_cast<Eigen::Index>(i));
        double Ft = 0.0, ct = 0.0;
        try {
          Ft = detail::objective_value(p, trial);
          ct = p.has_equality() ? p.equality(trial) : 0.0;
        } catch (const NumericError&) {
          continue;
        }
        const double mt = merit_of(Ft, ct, trial);
        // the last term tolerates merit roundoff once the decrease is that small
        if (std::isfinite(mt) && mt <= m0 + slope_floor * a * slope + 16 * eps * std::abs(m0)) {
          auto et = detail::evaluate(p, trial);
          if (!et.ok) continue;
          z = std::move(trial);
          e = std::move(et);
          accepted = true;
          break;
        }
      }
      if (accepted)
        damping = std::max(1e-12, damping / 3.0);
      else
        damping = std::max(1e-6, damping * 10.0);
    }
    ++it;
    if (!accepted) stalled = true;
  }

  if (converged) {
    sol.status = SolverStatus::converged;
  } else {
    sol.status = SolverStatus::iteration_cap;
  }
  p.project(z);
  sol.z = z;
  sol.iterations = it;
  sol.kkt_residual = err;
  sol.multiplier = lambda;
  try {
    sol.cost = detail::objective_value(p, z);
    sol.equality_residual = p.has_equality() ? p.equality(z) : 0.0;
  } catch (const NumericError&) {
    sol.cost = std::numeric_limits<double>::quiet_NaN();
  }
  if (!std::isfinite(sol.cost)) sol.status = SolverStatus::numeric_failure;
  return sol;
}

}  // namespace tvec::kpca
