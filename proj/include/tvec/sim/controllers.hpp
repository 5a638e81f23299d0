#pragma once

// Uniform controller interface for the simulation loop.

#include <algorithm>
#include <array>
#include <memory>
#include <optional>
#include <span>

#include "tvec/kpca/controller.hpp"
#include "tvec/ncc/geodesic.hpp"
#include "tvec/ncc/ncc2d.hpp"
#include "tvec/plants/uav2d.hpp"
#include "tvec/plants/uav3d.hpp"
#include "tvec/sim/log.hpp"

namespace tvec::sim {

template <plants::PlantModel P>
struct ControlOutput {
  plants::InputOf<P, double> u{};
  std::array<double, P::n2> x2d{};
  bool has_solver = false;
  SolverRecord solver;
};

/// Clamp each input to the box; analytic laws have no notion of the bounds.
template <std::size_t M>
std::array<double, M> saturate(std::array<double, M> u, const plants::InputBounds<M>& b) {
  for (std::size_t i = 0; i < M; ++i) u[i] = std::clamp(u[i], b.lower[i], b.upper[i]);
  return u;
}

template <plants::PlantModel P>
class Controller {
 public:
  virtual ~Controller() = default;
  virtual ControlOutput<P> compute(const plants::StateOf<P, double>& x, std::span<const double> ref) = 0;
};

class Ncc2dController : public Controller<plants::Uav2d> {
 public:
  Ncc2dController(const plants::Uav2dParams& params, const ncc::Ncc2dGains& gains, bool optimal_mapping = false,
                  std::optional<plants::InputBounds<2>> clamp = std::nullopt)
      : params_(params), gains_(gains), optimal_(optimal_mapping), clamp_(clamp) {
    gains_.validate();
  }
  ControlOutput<plants::Uav2d> compute(const std::array<double, 4>& x, std::span<const double> ref) override {
    ncc::Ncc2dGains k = gains_;
    k.alpha_d = ref[0];
    k.validate();
    const auto c = optimal_ ? ncc::optimal2d_step(k, x, params_) : ncc::ncc2d_step(k, x, params_);
    ControlOutput<plants::Uav2d> out;
    out.u = {c.u1, c.u2};
    if (clamp_) out.u = saturate(out.u, *clamp_);
    out.x2d = {c.beta_d, 0.0};
    return out;
  }

 private:
  plants::Uav2dParams params_;
  ncc::Ncc2dGains gains_;
  bool optimal_;
  std::optional<plants::InputBounds<2>> clamp_;
};

class Ncc3dController : public Controller<plants::Uav3d> {
 public:
  Ncc3dController(const plants::Uav3dParams& params, const ncc::GeodesicGains& gains,
                  std::optional<plants::InputBounds<4>> clamp = std::nullopt)
      : params_(params), gains_(gains), clamp_(clamp) {
    gains_.validate();
  }
  ControlOutput<plants::Uav3d> compute(const std::array<double, 11>& x, std::span<const double> ref) override {
    const auto c = ncc::ncc3d_step(gains_, x, ref[0], ref[1], params_);
    ControlOutput<plants::Uav3d> out;
    out.u = {c.T, c.tau[0], c.tau[1], c.tau[2]};
    if (clamp_) out.u = saturate(out.u, *clamp_);
    out.x2d = {c.q_d.w, c.q_d.v[0], c.q_d.v[1], c.q_d.v[2], 0.0, 0.0, 0.0};
    return out;
  }

 private:
  plants::Uav3dParams params_;
  ncc::GeodesicGains gains_;
  std::optional<plants::InputBounds<4>> clamp_;
};

template <plants::PlantModel P>
class KpcaLoop : public Controller<P> {
 public:
  KpcaLoop(const P& plant, const kpca::KpcaConfig<P>& cfg, const kpca::SolverOptions& opts)
      : ctrl_(plant, cfg, opts) {}
  ControlOutput<P> compute(const plants::StateOf<P, double>& x, std::span<const double> ref) override {
    const auto r = ctrl_.step(x, P::x1_reference(ref));
    ControlOutput<P> out;
    out.u = r.u_applied;
    out.x2d = r.x2d;
    out.has_solver = true;
    out.solver.iterations = r.solution.iterations;
    out.solver.status = kpca::to_string(r.solution.status);
    out.solver.cost = r.solution.cost;
    out.solver.kkt_residual = r.solution.kkt_residual;
    out.solver.equality_residual = r.solution.equality_residual;
    out.solver.failed = r.failed;
    return out;
  }
  const kpca::KpcaController<P>& inner() const { return ctrl_; }

 private:
  kpca::KpcaController<P> ctrl_;
};

}  // namespace tvec::sim
