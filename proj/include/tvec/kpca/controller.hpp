#pragma once

// Receding-horizon loop around KpcaProblem: apply the first input sample,
// shift the solution one step for the next warm start.

#include <algorithm>
#include <array>
#include <vector>

#include "tvec/kpca/problem.hpp"
#include "tvec/kpca/solver.hpp"

namespace tvec::kpca {

template <plants::PlantModel P>
struct KpcaStepResult {
  plants::InputOf<P, double> u_applied{};
  std::array<double, P::n2> x2d{};
  NlpSolution solution;
  bool failed = false;
};

template <plants::PlantModel P>
class KpcaController {
 public:
  using State = plants::StateOf<P, double>;
  using Input = plants::InputOf<P, double>;

  KpcaController(const P& plant, const KpcaConfig<P>& cfg, const SolverOptions& opts)
      : plant_(plant), cfg_(cfg), opts_(opts), u_prev_(plant.bounds.midpoint()) {
    cfg_.validate();
    opts_.validate();
  }

  const Input& u_prev() const { return u_prev_; }
  const KpcaConfig<P>& config() const { return cfg_; }
  const SolverOptions& options() const { return opts_; }

  /// Initial decision vector: u_prev held over the horizon, set-point on the kernel.
  std::vector<double> cold_start(const State& x) const {
    std::vector<double> z;
    for (int k = 0; k < cfg_.N; ++k) z.insert(z.end(), u_prev_.begin(), u_prev_.end());
    const auto K = plant_.kernel_point(plants::slice<0, P::n1, double>(x), cfg_.kernel_branch, cfg_.kernel_free);
    for (std::size_t i : cfg_.x2d_mask) z.push_back(K[i]);
    return z;
  }

  KpcaStepResult<P> step(const State& x, const std::array<double, P::n1>& x1_d) {
    const KpcaProblem<P> problem(plant_, cfg_, x, x1_d, u_prev_);
    const bool warm = opts_.warm_start && !warm_z_.empty();
    std::vector<double> init = warm ? warm_z_ : cold_start(x);
    KpcaStepResult<P> out;
    out.solution = solve(problem, std::move(init), opts_, warm ? warm_lambda_ : 0.0);

    if (out.solution.status == SolverStatus::numeric_failure) {
      out.failed = true;
      out.u_applied = u_prev_;
      out.x2d = problem.x2d(cold_start(x));
      warm_z_.clear();
      warm_lambda_ = 0.0;
      return out;
    }

    const auto& z = out.solution.z;
    for (std::size_t j = 0; j < P::m; ++j)
      out.u_applied[j] = std::clamp(z[j], plant_.bounds.lower[j], plant_.bounds.upper[j]);
    out.x2d = problem.x2d(z);
    u_prev_ = out.u_applied;

    warm_z_ = z;
    const std::size_t nu = problem.input_count();
    std::copy(z.begin() + P::m, z.begin() + static_cast<std::ptrdiff_t>(nu), warm_z_.begin());
    warm_lambda_ = out.solution.multiplier;
    return out;
  }

 private:
  P plant_;
  KpcaConfig<P> cfg_;
  SolverOptions opts_;
  Input u_prev_;
  std::vector<double> warm_z_;
  double warm_lambda_ = 0.0;
};

}  // namespace tvec::kpca
