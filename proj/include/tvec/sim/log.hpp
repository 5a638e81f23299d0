#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tvec::sim {

/// Per-step solver diagnostics; left at defaults for analytic controllers.
struct SolverRecord {
  int iterations = 0;
  std::string status;
  double cost = 0.0;
  double kkt_residual = 0.0;
  double equality_residual = 0.0;
  bool failed = false;
};

/// One record per control period, k = 0..K, on the grid t_k = k * Ts.
/// u[k] is the input held over [t_k, t_{k+1}).
struct TrajectoryLog {
  std::string model;
  std::vector<std::string> state_names;
  std::vector<std::string> input_names;
  std::vector<std::string> setpoint_names;  // names of the logged x2d components
  std::vector<bool> state_is_angle;
  std::vector<std::size_t> reference_states;  // state index tracked by each reference channel
  std::size_t m1 = 0;
  double Ts = 0.0;
  bool has_x2d = false;
  bool has_solver = false;

  std::vector<double> t;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> reference;
  std::vector<std::vector<double>> x2d;          // setpoint components only
  std::vector<std::vector<double>> eff_ctrl;
  std::vector<double> kernel_dist;
  std::vector<std::vector<double>> delta2;       // x2d - x2 (setpoint components)
  std::vector<std::vector<double>> delta1_rate;  // backward difference of x2d
  std::vector<SolverRecord> solver;

  std::optional<std::size_t> failed_at;  // first step whose integration failed
  std::string failure;

  std::size_t size() const { return t.size(); }
};

}  // namespace tvec::sim
