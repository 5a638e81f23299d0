#pragma once

// Acceptance gate: structural probes (ranks, kernel identity, derivative and
// integrator checks) plus criteria evaluated from scenario reports on disk.
//
// Directory layout read by evaluate_criteria():
//   <dir>/structural.json
//   <dir>/<preset>/{metrics.json, trajectory.csv, config.ini}
//   <dir>/example2-kpca-sweep/sweep_report.json

#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tvec/cli/runner.hpp"
#include "tvec/kpca/problem.hpp"
#include "tvec/math/integrate.hpp"

namespace tvec::cli {

inline constexpr const char* kSweepDir = "example2-kpca-sweep";
inline const std::vector<std::string>& kappa_w_sweep_values() {
  static const std::vector<std::string> v{"0.1", "1", "10"};
  return v;
}

namespace probes {

struct Ranks {
  int uav2d_singular = 0;
  int uav2d_generic = 0;
  int uav3d_singular = 0;
  int vessel_singular = 0;
  int vessel_singular_zero_thrust = 0;
};

/// Singular equilibria: planar object upright with zero inputs; spherical
/// object at the pole with identity attitude; vessel with propellers at
/// +/- pi/2 and equal thrust. The generic planar point has the object at
/// pi/4, thrust perpendicular to the arm balancing gravity.
inline Ranks controllability_ranks() {
  Ranks r;
  const plants::Uav2d p2;
  r.uav2d_singular = plants::controllability_rank(plants::linearize(p2, {M_PI / 2, 0, M_PI / 2, 0}, {0, 0}));
  const double a = M_PI / 4;
  const double T = p2.params.m_tilde() * p2.params.g * std::cos(a);
  r.uav2d_generic = plants::controllability_rank(plants::linearize(p2, {a, 0, a + M_PI / 2, 0}, {T, 0}));
  const plants::Uav3d p3;
  r.uav3d_singular =
      plants::controllability_rank(plants::linearize(p3, {M_PI / 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0}));
  const plants::Vessel pv;
  const std::array<double, 10> xv{0, 0, 0, 0, 0, 0, M_PI / 2, -M_PI / 2, 0, 0};
  r.vessel_singular = plants::controllability_rank(plants::linearize(pv, xv, {1000.0, 1000.0, 0, 0}));
  r.vessel_singular_zero_thrust = plants::controllability_rank(plants::linearize(pv, xv, {0, 0, 0, 0}));
  return r;
}

/// Largest ||Psi(x1, K(x1), u1)||_inf / max(1, ||u1||_inf) over `samples`
/// random kernel points with admissible u1.
template <plants::PlantModel P, class Sample>
double kernel_identity(const P& plant, int samples, std::uint64_t seed, Sample draw_x1) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> branch(-2, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0), free_d(-3.0, 3.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const std::array<double, P::n1> x1 = draw_x1(rng);
    std::vector<double> free(P::kernel_arity);
    for (auto& v : free) v = free_d(rng);
    const auto x2 = plant.kernel_point(x1, branch(rng), free);
    std::array<double, P::m1> u1;
    // Equal thrusts: the vessel kernel holds only for T1 = T2.
    const double t = plant.bounds.lower[0] + unit(rng) * (plant.bounds.upper[0] - plant.bounds.lower[0]);
    u1.fill(t);
    const auto psi = plant.effective_control(x1, x2, u1);
    double m = 0.0;
    for (double v : psi) m = std::max(m, std::abs(v));
    worst = std::max(worst, m / std::max(1.0, std::abs(t)));
  }
  return worst;
}

struct KernelIdentity {
  double uav2d = 0.0, uav3d = 0.0, vessel = 0.0;
};

inline KernelIdentity kernel_identities(int samples = 1000) {
  KernelIdentity k;
  k.uav2d = kernel_identity(plants::Uav2d{}, samples, 11, [](std::mt19937_64& g) {
    std::uniform_real_distribution<double> a(0.0, M_PI), r(-3.0, 3.0);
    return std::array<double, 2>{a(g), r(g)};
  });
  k.uav3d = kernel_identity(plants::Uav3d{}, samples, 12, [](std::mt19937_64& g) {
    std::uniform_real_distribution<double> p(0.0, M_PI), t(-M_PI, M_PI), r(-3.0, 3.0);
    return std::array<double, 4>{p(g), t(g), r(g), r(g)};
  });
  k.vessel = kernel_identity(plants::Vessel{}, samples, 13, [](std::mt19937_64& g) {
    std::uniform_real_distribution<double> pos(-10.0, 10.0), a(-M_PI, M_PI), r(-2.0, 2.0);
    return std::array<double, 6>{pos(g), pos(g), a(g), r(g), r(g), r(g)};
  });
  return k;
}

/// Worst gradient-check error over `points` random interior decision vectors
/// of the problem defined by `cfg` at a randomly perturbed initial state.
template <plants::PlantModel P>
double gradient_check(const P& plant, const kpca::KpcaConfig<P>& cfg, const plants::StateOf<P, double>& x_base,
                      const std::array<double, P::n1>& x1_d, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95), jitter(-0.1, 0.1);
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    plants::StateOf<P, double> x0 = x_base;
    for (auto& v : x0) v += jitter(rng);
    plant.renormalize(x0);
    plants::InputOf<P, double> u_prev;
    for (std::size_t j = 0; j < P::m; ++j)
      u_prev[j] = plant.bounds.lower[j] + unit(rng) * (plant.bounds.upper[j] - plant.bounds.lower[j]);
    const kpca::KpcaProblem<P> problem(plant, cfg, x0, x1_d, u_prev);
    std::vector<double> z(problem.dim());
    for (std::size_t i = 0; i < problem.input_count(); ++i)
      z[i] = problem.lower()[i] + unit(rng) * (problem.upper()[i] - problem.lower()[i]);
    const auto K = plant.kernel_point(plants::slice<0, P::n1, double>(x0), cfg.kernel_branch, cfg.kernel_free);
    for (std::size_t i = 0; i < cfg.x2d_mask.size(); ++i) z[problem.input_count() + i] = K[cfg.x2d_mask[i]] + jitter(rng);
    worst = std::max(worst, kpca::cost_gradient_check(problem, z));
  }
  return worst;
}

struct GradientChecks {
  double example1 = 0.0, example2 = 0.0, example3 = 0.0;
};

inline GradientChecks gradient_checks(int points = 10) {
  GradientChecks g;
  {
    const RunConfig c = preset_config("example1-kpca-bell");
    const plants::Uav2d plant(c.uav2d, {detail::to_array<2>(c.u_min), detail::to_array<2>(c.u_max)});
    g.example1 = gradient_check(plant, detail::kpca_config<plants::Uav2d>(c), detail::to_array<4>(c.scenario.x0),
                                {M_PI / 2, 0.0}, points, 21);
  }
  {
    const RunConfig c = preset_config("example2-kpca");
    const plants::Uav3d plant(c.uav3d, {detail::to_array<4>(c.u_min), detail::to_array<4>(c.u_max)});
    g.example2 = gradient_check(plant, detail::kpca_config<plants::Uav3d>(c), detail::to_array<11>(c.scenario.x0),
                                {M_PI / 2, 0.0, 0.0, 0.0}, points, 22);
  }
  {
    const RunConfig c = preset_config("example3-kpca-kernel");
    const plants::Vessel plant(c.vessel, {detail::to_array<4>(c.u_min), detail::to_array<4>(c.u_max)}, c.theta_limit);
    auto x0 = detail::to_array<10>(c.scenario.x0);
    x0[6] = M_PI / 2;
    x0[7] = -M_PI / 2;
    g.example3 = gradient_check(plant, detail::kpca_config<plants::Vessel>(c), x0, {-5.0, -3.0, M_PI, 0, 0, 0},
                                points, 23);
  }
  return g;
}

/// Observed order log2(e(h) / e(h/2)) of RK4 on x'' = -x over [0, 2] against
/// the exact solution (cos t, -sin t).
inline double rk4_observed_order(double h = 0.1) {
  auto err = [](double step) {
    auto field = [](const std::array<double, 2>& x, const std::array<double, 0>&) {
      return std::array<double, 2>{x[1], -x[0]};
    };
    std::array<double, 2> x{1.0, 0.0};
    const int n = static_cast<int>(std::lround(2.0 / step));
    for (int i = 0; i < n; ++i) x = math::rk4_step(field, x, std::array<double, 0>{}, step);
    return std::hypot(x[0] - std::cos(2.0), x[1] + std::sin(2.0));
  };
  return std::log2(err(h) / err(h / 2));
}

}  // namespace probes

inline json structural_report() {
  json j;
  const auto r = probes::controllability_ranks();
  j["ranks"] = {{"uav2d_singular", r.uav2d_singular},
                {"uav2d_generic", r.uav2d_generic},
                {"uav3d_singular", r.uav3d_singular},
                {"vessel_singular", r.vessel_singular},
                {"vessel_singular_zero_thrust", r.vessel_singular_zero_thrust}};
  const auto k = probes::kernel_identities();
  j["kernel_identity"] = {{"uav2d", k.uav2d}, {"uav3d", k.uav3d}, {"vessel", k.vessel}, {"samples", 1000}};
  const auto g = probes::gradient_checks();
  j["gradient_check"] = {{"example1", g.example1}, {"example2", g.example2}, {"example3", g.example3}, {"points", 10}};
  j["rk4_observed_order"] = probes::rk4_observed_order();
  return j;
}

struct Criterion {
  std::string id;
  Flag flag = Flag::not_applicable;
  std::string detail;
};

namespace detail {

inline std::optional<json> load_json(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  try {
    return json::parse(read_text(p));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::optional<double> opt_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  return std::nullopt;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}
inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("none"); }

inline double abs_at(const json& channel, const char* field, std::size_t i) {
  const auto v = opt_number(channel[field][i]);
  return v ? std::abs(*v) : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Evaluate A1..A10 from `dir`. Missing inputs make a criterion
/// not-applicable. A10 re-runs each stored config.ini and compares bytes.
inline std::vector<Criterion> evaluate_criteria(const fs::path& dir, int jobs = 1) {
  using detail::fmt;
  using detail::load_json;
  using detail::opt_number;
  std::vector<Criterion> out;
  const auto structural = load_json(dir / "structural.json");
  auto report = [&](const std::string& name) { return load_json(dir / name / "metrics.json"); };

  {
    Criterion c{"A1", Flag::not_applicable, ""};
    if (structural) {
      const auto& r = (*structural)["ranks"];
      const int s2 = r["uav2d_singular"], g2 = r["uav2d_generic"], sv = r["vessel_singular"];
      c.flag = flag_of(s2 == 2 && sv == 8 && g2 == 4);
      c.detail = "rank uav2d singular " + std::to_string(s2) + " (2), vessel singular " + std::to_string(sv) +
                 " (8), uav2d generic " + std::to_string(g2) + " (4)";
    }
    out.push_back(c);
  }
  const auto ncc = report("example1-ncc");
  const auto opt = report("example1-optimal-mapping");
  {
    Criterion c{"A2", Flag::not_applicable, ""};
    if (ncc && opt) {
      const auto& o = (*opt)["channels"][0];
      const auto& n = (*ncc)["channels"][0];
      const auto ts = opt_number(n["settling_time"]);
      const bool opt_ok = o["oscillating"].get<bool>() && o["settling_time"].is_null();
      const bool ncc_ok = ts && *ts <= 30.0 && !n["oscillating"].get<bool>();
      c.flag = flag_of(opt_ok && ncc_ok);
      c.detail = "optimal: oscillating " + std::string(o["oscillating"].get<bool>() ? "yes" : "no") + ", settle " +
                 fmt(opt_number(o["settling_time"])) + "; ncc: settle " + fmt(ts) + ", oscillating " +
                 (n["oscillating"].get<bool>() ? "yes" : "no");
    }
    out.push_back(c);
  }
  {
    Criterion c{"A3", Flag::not_applicable, ""};
    const auto off = report("example1-kpca-nokernel");
    const auto con = report("example1-kpca-constant");
    const auto bell = report("example1-kpca-bell");
    if (off && con && bell) {
      const auto s_off = opt_number((*off)["channels"][0]["settling_time"]);
      const auto s_con = opt_number((*con)["channels"][0]["settling_time"]);
      const auto s_bell = opt_number((*bell)["channels"][0]["settling_time"]);
      const double th_con = (*con)["thrust_effort"], th_bell = (*bell)["thrust_effort"];
      c.flag = flag_of(!s_off && s_con && s_bell && *s_bell <= *s_con && th_bell <= th_con);
      c.detail = "settle nokernel " + fmt(s_off) + ", constant " + fmt(s_con) + ", bell " + fmt(s_bell) +
                 "; thrust constant " + fmt(th_con) + ", bell " + fmt(th_bell);
    }
    out.push_back(c);
  }
  {
    Criterion c{"A4", Flag::not_applicable, ""};
    std::vector<fs::path> reports;
    for (const auto& p : preset_catalog())
      if (p.make().is_kpca()) reports.push_back(dir / p.name / "metrics.json");
    for (const auto& v : kappa_w_sweep_values()) reports.push_back(dir / kSweepDir / ("kappa_w=" + v) / "metrics.json");
    std::size_t violations = 0, found = 0;
    for (const auto& r : reports)
      if (const auto j = load_json(r)) {
        ++found;
        violations += (*j)["bounds_violations"].get<std::size_t>();
      }
    if (found == reports.size()) c.flag = flag_of(violations == 0);
    c.detail = std::to_string(violations) + " bound violations over " + std::to_string(found) + "/" +
               std::to_string(reports.size()) + " KPCA runs";
    out.push_back(c);
  }
  {
    Criterion c{"A5", Flag::not_applicable, ""};
    const auto e2 = report("example2-kpca");
    const auto sweep = load_json(dir / kSweepDir / "sweep_report.json");
    if (e2 && sweep) {
      double worst = 0.0;
      for (const auto& ch : (*e2)["channels"])
        for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, detail::abs_at(ch, "interval_end_error", i));
      const auto qn = opt_number((*e2)["max_qd_norm_deviation"]);
      const bool trend = (*sweep)["peak_count_non_increasing"].get<bool>();
      std::string peaks;
      for (const auto& r : (*sweep)["runs"]) peaks += (peaks.empty() ? "" : "/") + std::to_string(r["peak_count"].get<int>());
      c.flag = flag_of(worst <= 0.05 && qn && *qn <= 1e-6 && trend);
      c.detail = "max pre-switch error " + fmt(worst) + " rad, |q_d| deviation " + fmt(qn) +
                 ", peaks over kappa_w sweep " + peaks + (trend ? " (non-increasing)" : " (not monotone)");
    }
    out.push_back(c);
  }
  {
    Criterion c{"A6", Flag::not_applicable, ""};
    const auto k = report("example3-kpca-kernel");
    const auto nk = report("example3-kpca-nokernel");
    if (k && nk) {
      const double tol[3] = {0.2, 0.2, 0.05};
      auto within = [&](const json& r, std::size_t i) {
        for (std::size_t ch = 0; ch < 3; ++ch)
          if (!(detail::abs_at(r["channels"][ch], "interval_end_error", i) <= tol[ch])) return false;
        return true;
      };
      bool kernel_ok = true;
      int kernel_hits = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        kernel_ok = kernel_ok && within(*k, i);
        kernel_hits += within(*k, i);
      }
      const bool nk_fails = !within(*nk, 1) && !within(*nk, 2);
      const auto& y = (*nk)["channels"][1];
      const double y0 = detail::abs_at(y, "interval_start_error", 3), y1 = detail::abs_at(y, "interval_end_error", 3);
      const bool drift = y1 > y0;
      c.flag = flag_of(kernel_ok && nk_fails && drift);
      c.detail = "kernel config within tolerance at " + std::to_string(kernel_hits) +
                 "/4 switches; nokernel misses intervals 2 and 3: " + (nk_fails ? "yes" : "no") +
                 "; nokernel |y| error over last interval " + fmt(y0) + " -> " + fmt(y1);
    }
    out.push_back(c);
  }
  {
    Criterion c{"A7", Flag::not_applicable, ""};
    if (structural) {
      const auto& k = (*structural)["kernel_identity"];
      const double w = std::max({k["uav2d"].get<double>(), k["uav3d"].get<double>(), k["vessel"].get<double>()});
      c.flag = flag_of(w <= 1e-12);
      c.detail = "max ||Psi||_inf per unit thrust " + fmt(w);
    }
    out.push_back(c);
  }
  {
    Criterion c{"A8", Flag::not_applicable, ""};
    if (structural) {
      const auto& g = (*structural)["gradient_check"];
      const double w = std::max({g["example1"].get<double>(), g["example2"].get<double>(), g["example3"].get<double>()});
      const double order = (*structural)["rk4_observed_order"];
      c.flag = flag_of(w <= 1e-6 && order >= 3.8);
      c.detail = "worst gradient relative error " + fmt(w) + ", RK4 observed order " + fmt(order);
    }
    out.push_back(c);
  }
  {
    Criterion c{"A9", Flag::not_applicable, ""};
    if (ncc && opt) {
      const double prod = (*ncc)["gain_product"];
      const double s_ncc = (*ncc)["tail_sup_delta2"], s_opt = (*opt)["tail_sup_delta2"];
      c.flag = flag_of(prod < 1.0 && s_opt > 10.0 * s_ncc);
      c.detail = "ncc gain product " + fmt(prod) + "; tail sup delta2 optimal " + fmt(s_opt) + " vs ncc " + fmt(s_ncc);
    }
    out.push_back(c);
  }
  {
    Criterion c{"A10", Flag::not_applicable, ""};
    std::vector<std::string> names;
    for (const auto& p : preset_catalog())
      if (fs::exists(dir / p.name / "config.ini") && fs::exists(dir / p.name / "trajectory.csv")) names.push_back(p.name);
    if (names.size() == preset_catalog().size()) {
      std::vector<int> same(names.size(), 0), dump_same(names.size(), 0);
      parallel_for(names.size(), jobs, [&](std::size_t i) {
        const std::string ini = read_text(dir / names[i] / "config.ini");
        dump_same[i] = ini == dump_config(preset_config(names[i]));
        const RunResult r = run_config(parse_config(ini, (dir / names[i] / "config.ini").string()));
        same[i] = trajectory_csv(r.log) == read_text(dir / names[i] / "trajectory.csv");
      });
      int n_same = 0, n_dump = 0;
      for (std::size_t i = 0; i < names.size(); ++i) {
        n_same += same[i];
        n_dump += dump_same[i];
      }
      c.flag = flag_of(n_same == static_cast<int>(names.size()) && n_dump == static_cast<int>(names.size()));
      c.detail = std::to_string(n_same) + "/" + std::to_string(names.size()) +
                 " presets re-run bit-identical from the config echo; " + std::to_string(n_dump) + "/" +
                 std::to_string(names.size()) + " echoes equal dump-preset";
    } else {
      c.detail = std::to_string(names.size()) + "/" + std::to_string(preset_catalog().size()) + " preset runs present";
    }
    out.push_back(c);
  }
  return out;
}

/// Everything evaluate_criteria() reads: all presets, the kappa_w sweep and
/// the structural probes.
inline void run_acceptance_set(const fs::path& dir, int jobs) {
  fs::create_directories(dir);
  const auto& catalog = preset_catalog();
  parallel_for(catalog.size() + 2, jobs, [&](std::size_t i) {
    if (i < catalog.size()) {
      write_run(run_config(preset_config(catalog[i].name)), dir / catalog[i].name);
    } else if (i == catalog.size()) {
      run_sweep(preset_config("example2-kpca"), "kappa_w", kappa_w_sweep_values(), dir / kSweepDir, 1);
    } else {
      write_text(dir / "structural.json", structural_report().dump(2) + "\n");
    }
  });
}

inline std::string criteria_table(const std::vector<Criterion>& cs) {
  std::string s;
  char buf[64];
  for (const auto& c : cs) {
    std::snprintf(buf, sizeof buf, "%-4s %-15s ", c.id.c_str(), to_string(c.flag));
    s += buf + c.detail + "\n";
  }
  return s;
}

inline bool all_pass(const std::vector<Criterion>& cs) {
  for (const auto& c : cs)
    if (c.flag != Flag::pass) return false;
  return !cs.empty();
}

}  // namespace tvec::cli
