#pragma once

// Run configuration: `[section]` headers, `key = value` lines, `#` comments,
// lists as `[a, b, c]`. Every key is bound to a typed field of RunConfig;
// anything else is rejected with file, line and key.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tvec/kpca/problem.hpp"
#include "tvec/kpca/solver.hpp"
#include "tvec/ncc/geodesic.hpp"
#include "tvec/ncc/ncc2d.hpp"
#include "tvec/plants/uav2d.hpp"
#include "tvec/plants/uav3d.hpp"
#include "tvec/plants/vessel.hpp"

namespace tvec::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KpcaSection {
  std::vector<double> Q, R;
  double kappa_p = 0.0;
  double kappa_w = 1.0;
  double Ts = 0.1;
  int N = 10;
  std::string kernel_mode = "off";
  std::vector<double> x2d_mask;  // empty: the model's set-point components
  std::string equality;          // empty: unit_quaternion for uav3d, none otherwise
  std::vector<double> penalty_states;
  std::vector<double> penalty_limits;
  double penalty_weight = 1e4;
};

struct ScenarioSection {
  std::string name = "scenario";
  std::vector<double> x0;
  double duration = 10.0;
  double Ts_ctrl = 0.1;
  int substeps = 10;
  std::vector<double> schedule_times{0.0};
  std::vector<double> schedule_values;  // row-major, one row per interval
  int kernel_branch = 0;
  std::vector<double> kernel_free;  // empty: zeros
  double tail_fraction = 0.5;
  std::vector<double> settle_tol;  // empty: model default
  double settle_hold = 2.0;
  double osc_window = 20.0;
};

struct RunConfig {
  std::string model = "uav2d";
  plants::Uav2dParams uav2d;
  plants::Uav3dParams uav3d;
  plants::VesselParams vessel;
  double theta_limit = M_PI;
  std::vector<double> u_min, u_max;  // empty: model default

  std::string controller = "ncc2d";
  ncc::Ncc2dGains ncc2d;
  ncc::GeodesicGains ncc3d;
  bool saturate = true;

  KpcaSection kpca;
  kpca::SolverOptions solver;
  ScenarioSection scenario;
  std::vector<std::string> deviations;

  bool is_kpca() const { return controller == "kpca"; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::vector<double>> parse_list(const std::string& s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') return std::nullopt;
  const std::string body = trim(std::string_view(s).substr(1, s.size() - 2));
  std::vector<double> out;
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_number(trim(item));
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + "]";
}

template <std::size_t N>
std::vector<double> to_vec(const std::array<double, N>& a) {
  return {a.begin(), a.end()};
}

}  // namespace detail

enum class FieldKind { number, integer, boolean, word, list, text };

/// One bindable key. `applies` decides from the already-known model and
/// controller whether the key belongs in the file at all.
struct Field {
  std::string section;
  std::string key;
  FieldKind kind;
  std::function<bool(const RunConfig&)> applies;
  std::function<void(RunConfig&, const std::string&)> set;  // throws std::invalid_argument on bad text
  std::function<std::string(const RunConfig&)> get;
  std::vector<std::string> choices;  // for words
};

namespace detail {

using Pred = std::function<bool(const RunConfig&)>;

inline Pred always() {
  return [](const RunConfig&) { return true; };
}
inline Pred for_model(std::string m) {
  return [m](const RunConfig& c) { return c.model == m; };
}
inline Pred for_controllers(std::vector<std::string> names) {
  return [names](const RunConfig& c) {
    for (const auto& n : names)
      if (c.controller == n) return true;
    return false;
  };
}

template <class Ref>
Field number(std::string section, std::string key, Pred p, Ref ref) {
  return {std::move(section), std::move(key), FieldKind::number, std::move(p),
          [ref](RunConfig& c, const std::string& s) {
            const auto v = parse_number(s);
            if (!v) throw std::invalid_argument("expected a number, got '" + s + "'");
            ref(c) = *v;
          },
          [ref](const RunConfig& c) { return format_number(ref(c)); },
          {}};
}

template <class Ref>
Field integer(std::string section, std::string key, Pred p, Ref ref) {
  return {std::move(section), std::move(key), FieldKind::integer, std::move(p),
          [ref](RunConfig& c, const std::string& s) {
            const auto v = parse_number(s);
            if (!v || *v != std::floor(*v) || std::abs(*v) > 1e9)
              throw std::invalid_argument("expected an integer, got '" + s + "'");
            ref(c) = static_cast<int>(*v);
          },
          [ref](const RunConfig& c) { return std::to_string(ref(c)); },
          {}};
}

template <class Ref>
Field boolean(std::string section, std::string key, Pred p, Ref ref) {
  return {std::move(section), std::move(key), FieldKind::boolean, std::move(p),
          [ref](RunConfig& c, const std::string& s) {
            if (s == "true") ref(c) = true;
            else if (s == "false") ref(c) = false;
            else throw std::invalid_argument("expected true or false, got '" + s + "'");
          },
          [ref](const RunConfig& c) { return std::string(ref(c) ? "true" : "false"); },
          {}};
}

template <class Ref>
Field word(std::string section, std::string key, Pred p, std::vector<std::string> choices, Ref ref) {
  return {std::move(section), std::move(key), FieldKind::word, std::move(p),
          [ref, choices](RunConfig& c, const std::string& s) {
            if (!choices.empty()) {
              bool ok = false;
              for (const auto& w : choices) ok = ok || w == s;
              if (!ok) {
                std::string all;
                for (const auto& w : choices) all += (all.empty() ? "" : " | ") + w;
                throw std::invalid_argument("expected one of " + all + ", got '" + s + "'");
              }
            } else if (s.empty() || s.find_first_of(" \t[],=") != std::string::npos) {
              throw std::invalid_argument("expected a single word, got '" + s + "'");
            }
            ref(c) = s;
          },
          [ref](const RunConfig& c) { return ref(c); }, choices};
}

template <class Ref>
Field list(std::string section, std::string key, Pred p, Ref ref) {
  return {std::move(section), std::move(key), FieldKind::list, std::move(p),
          [ref](RunConfig& c, const std::string& s) {
            const auto v = parse_list(s);
            if (!v) throw std::invalid_argument("expected a list like [1, 2], got '" + s + "'");
            ref(c) = *v;
          },
          [ref](const RunConfig& c) { return format_list(ref(c)); },
          {}};
}

template <std::size_t N, class Ref>
Field fixed_list(std::string section, std::string key, Pred p, Ref ref) {
  return {std::move(section), std::move(key), FieldKind::list, std::move(p),
          [ref](RunConfig& c, const std::string& s) {
            const auto v = parse_list(s);
            if (!v || v->size() != N)
              throw std::invalid_argument("expected a list of " + std::to_string(N) + " numbers, got '" + s + "'");
            for (std::size_t i = 0; i < N; ++i) ref(c)[i] = (*v)[i];
          },
          [ref](const RunConfig& c) { return format_list(to_vec(ref(c))); },
          {}};
}

}  // namespace detail

inline const std::vector<std::string>& section_order() {
  static const std::vector<std::string> s{"deviations", "plant", "controller", "kpca", "solver", "scenario"};
  return s;
}

/// The full key table, in dump order. `model` and `controller` come first in
/// their sections because every other key's applicability depends on them.
inline const std::vector<Field>& schema() {
  using namespace detail;
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    const Pred u2 = for_model("uav2d"), u3 = for_model("uav3d"), ve = for_model("vessel");
    const Pred kp = for_controllers({"kpca"});
    const Pred n2 = for_controllers({"ncc2d", "optimal2d"}), n3 = for_controllers({"ncc3d"});
    const Pred ncc = for_controllers({"ncc2d", "optimal2d", "ncc3d"});

    f.push_back(word("plant", "model", always(), {"uav2d", "uav3d", "vessel"},
                     [](auto& c) -> auto& { return c.model; }));
    f.push_back(number("plant", "m_u", u2, [](auto& c) -> auto& { return c.uav2d.m_u; }));
    f.push_back(number("plant", "I_u", u2, [](auto& c) -> auto& { return c.uav2d.I_u; }));
    f.push_back(number("plant", "m_o", u2, [](auto& c) -> auto& { return c.uav2d.m_o; }));
    f.push_back(number("plant", "I_o", u2, [](auto& c) -> auto& { return c.uav2d.I_o; }));
    f.push_back(number("plant", "ell", u2, [](auto& c) -> auto& { return c.uav2d.ell; }));
    f.push_back(number("plant", "g", u2, [](auto& c) -> auto& { return c.uav2d.g; }));
    f.push_back(number("plant", "m_u", u3, [](auto& c) -> auto& { return c.uav3d.m_u; }));
    f.push_back(fixed_list<3>("plant", "I_u", u3, [](auto& c) -> auto& { return c.uav3d.I_u; }));
    f.push_back(number("plant", "m_o", u3, [](auto& c) -> auto& { return c.uav3d.m_o; }));
    f.push_back(fixed_list<3>("plant", "I_o", u3, [](auto& c) -> auto& { return c.uav3d.I_o; }));
    f.push_back(number("plant", "ell", u3, [](auto& c) -> auto& { return c.uav3d.ell; }));
    f.push_back(number("plant", "g", u3, [](auto& c) -> auto& { return c.uav3d.g; }));
    f.push_back(number("plant", "m_v", ve, [](auto& c) -> auto& { return c.vessel.m_v; }));
    f.push_back(number("plant", "I_v", ve, [](auto& c) -> auto& { return c.vessel.I_v; }));
    f.push_back(number("plant", "I_p", ve, [](auto& c) -> auto& { return c.vessel.I_p; }));
    f.push_back(number("plant", "ell_x", ve, [](auto& c) -> auto& { return c.vessel.ell_x; }));
    f.push_back(number("plant", "ell_y", ve, [](auto& c) -> auto& { return c.vessel.ell_y; }));
    f.push_back(number("plant", "theta_limit", ve, [](auto& c) -> auto& { return c.theta_limit; }));
    f.push_back(list("plant", "u_min", always(), [](auto& c) -> auto& { return c.u_min; }));
    f.push_back(list("plant", "u_max", always(), [](auto& c) -> auto& { return c.u_max; }));

    f.push_back(word("controller", "controller", always(), {"ncc2d", "optimal2d", "ncc3d", "kpca"},
                     [](auto& c) -> auto& { return c.controller; }));
    f.push_back(number("controller", "kp_alpha", n2, [](auto& c) -> auto& { return c.ncc2d.kp_alpha; }));
    f.push_back(number("controller", "kd_alpha", n2, [](auto& c) -> auto& { return c.ncc2d.kd_alpha; }));
    f.push_back(number("controller", "kp_beta", n2, [](auto& c) -> auto& { return c.ncc2d.kp_beta; }));
    f.push_back(number("controller", "kd_beta", n2, [](auto& c) -> auto& { return c.ncc2d.kd_beta; }));
    f.push_back(number("controller", "epsilon", n2, [](auto& c) -> auto& { return c.ncc2d.epsilon; }));
    f.push_back(number("controller", "kp_t", n3, [](auto& c) -> auto& { return c.ncc3d.kp_t; }));
    f.push_back(number("controller", "kd_t", n3, [](auto& c) -> auto& { return c.ncc3d.kd_t; }));
    f.push_back(number("controller", "kp_q", n3, [](auto& c) -> auto& { return c.ncc3d.kp_q; }));
    f.push_back(number("controller", "kd_q", n3, [](auto& c) -> auto& { return c.ncc3d.kd_q; }));
    f.push_back(number("controller", "T_r", n3, [](auto& c) -> auto& { return c.ncc3d.T_r; }));
    f.push_back(number("controller", "epsilon", n3, [](auto& c) -> auto& { return c.ncc3d.epsilon; }));
    f.push_back(number("controller", "psi", n3, [](auto& c) -> auto& { return c.ncc3d.psi; }));
    f.push_back(boolean("controller", "saturate", ncc, [](auto& c) -> auto& { return c.saturate; }));

    f.push_back(list("kpca", "Q", kp, [](auto& c) -> auto& { return c.kpca.Q; }));
    f.push_back(list("kpca", "R", kp, [](auto& c) -> auto& { return c.kpca.R; }));
    f.push_back(number("kpca", "kappa_p", kp, [](auto& c) -> auto& { return c.kpca.kappa_p; }));
    f.push_back(number("kpca", "kappa_w", kp, [](auto& c) -> auto& { return c.kpca.kappa_w; }));
    f.push_back(number("kpca", "Ts", kp, [](auto& c) -> auto& { return c.kpca.Ts; }));
    f.push_back(integer("kpca", "N", kp, [](auto& c) -> auto& { return c.kpca.N; }));
    f.push_back(word("kpca", "kernel_mode", kp, {"off", "constant", "bell"},
                     [](auto& c) -> auto& { return c.kpca.kernel_mode; }));
    f.push_back(list("kpca", "x2d_mask", kp, [](auto& c) -> auto& { return c.kpca.x2d_mask; }));
    f.push_back(word("kpca", "equality", kp, {"none", "unit_quaternion"},
                     [](auto& c) -> auto& { return c.kpca.equality; }));
    f.push_back(list("kpca", "penalty_states", kp,
                     [](auto& c) -> auto& { return c.kpca.penalty_states; }));
    f.push_back(list("kpca", "penalty_limits", kp,
                     [](auto& c) -> auto& { return c.kpca.penalty_limits; }));
    f.push_back(number("kpca", "penalty_weight", kp, [](auto& c) -> auto& { return c.kpca.penalty_weight; }));

    f.push_back(integer("solver", "max_iter", kp, [](auto& c) -> auto& { return c.solver.max_iter; }));
    f.push_back(number("solver", "mu_min", kp, [](auto& c) -> auto& { return c.solver.mu_min; }));
    f.push_back(number("solver", "mu_init", kp, [](auto& c) -> auto& { return c.solver.mu_init; }));
    f.push_back(number("solver", "tol_kkt", kp, [](auto& c) -> auto& { return c.solver.tol_kkt; }));
    f.push_back(boolean("solver", "warm_start", kp, [](auto& c) -> auto& { return c.solver.warm_start; }));
    f.push_back(number("solver", "penalty_eq", kp, [](auto& c) -> auto& { return c.solver.penalty_eq; }));
    f.push_back(number("solver", "tol_eq", kp, [](auto& c) -> auto& { return c.solver.tol_eq; }));

    f.push_back(word("scenario", "name", always(), {}, [](auto& c) -> auto& { return c.scenario.name; }));
    f.push_back(list("scenario", "x0", always(), [](auto& c) -> auto& { return c.scenario.x0; }));
    f.push_back(number("scenario", "duration", always(), [](auto& c) -> auto& { return c.scenario.duration; }));
    f.push_back(number("scenario", "Ts_ctrl", always(), [](auto& c) -> auto& { return c.scenario.Ts_ctrl; }));
    f.push_back(integer("scenario", "substeps", always(), [](auto& c) -> auto& { return c.scenario.substeps; }));
    f.push_back(list("scenario", "schedule_times", always(),
                     [](auto& c) -> auto& { return c.scenario.schedule_times; }));
    f.push_back(list("scenario", "schedule_values", always(),
                     [](auto& c) -> auto& { return c.scenario.schedule_values; }));
    f.push_back(integer("scenario", "kernel_branch", always(),
                        [](auto& c) -> auto& { return c.scenario.kernel_branch; }));
    f.push_back(list("scenario", "kernel_free", always(),
                     [](auto& c) -> auto& { return c.scenario.kernel_free; }));
    f.push_back(number("scenario", "tail_fraction", always(),
                       [](auto& c) -> auto& { return c.scenario.tail_fraction; }));
    f.push_back(list("scenario", "settle_tol", always(),
                     [](auto& c) -> auto& { return c.scenario.settle_tol; }));
    f.push_back(number("scenario", "settle_hold", always(),
                       [](auto& c) -> auto& { return c.scenario.settle_hold; }));
    f.push_back(number("scenario", "osc_window", always(),
                       [](auto& c) -> auto& { return c.scenario.osc_window; }));
    return f;
  }();
  return fields;
}

/// Matching field for (section, key) given the current model/controller, or
/// nullptr. A key can exist under several models with different types.
inline const Field* find_field(const RunConfig& c, const std::string& section, const std::string& key) {
  for (const auto& f : schema())
    if (f.section == section && f.key == key && f.applies(c)) return &f;
  return nullptr;
}

inline bool key_exists_anywhere(const std::string& section, const std::string& key) {
  for (const auto& f : schema())
    if (f.section == section && f.key == key) return true;
  return false;
}

namespace detail {

struct Line {
  int number;
  std::string section;
  std::string key;
  std::string value;
};

inline std::string where(const std::string& file, int line) { return file + ":" + std::to_string(line) + ": "; }

inline std::vector<Line> tokenize(std::string_view text, const std::string& file) {
  std::vector<Line> out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') throw ConfigError(where(file, number) + "malformed section header '" + line + "'");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      bool known = false;
      for (const auto& s : section_order()) known = known || s == section;
      if (!known) throw ConfigError(where(file, number) + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where(file, number) + "expected 'key = value', got '" + line + "'");
    if (section.empty()) throw ConfigError(where(file, number) + "key outside of any section");
    out.push_back({number, section, trim(std::string_view(line).substr(0, eq)),
                   trim(std::string_view(line).substr(eq + 1))});
  }
  return out;
}

}  // namespace detail

/// Assign one key on an existing config (used by the parser and by sweeps).
inline void apply_setting(RunConfig& c, const std::string& section, const std::string& key, const std::string& value) {
  const Field* f = find_field(c, section, key);
  if (!f) {
    if (key_exists_anywhere(section, key))
      throw std::invalid_argument("key '" + key + "' does not apply to model '" + c.model + "' with controller '" +
                                  c.controller + "'");
    throw std::invalid_argument("unknown key '" + key + "' in section [" + section + "]");
  }
  f->set(c, value);
}

/// Parse a complete config. `model` and `controller` are read first so that
/// model-specific keys can be checked regardless of line order.
inline RunConfig parse_config(std::string_view text, const std::string& file = "<config>") {
  const auto lines = detail::tokenize(text, file);
  RunConfig c;
  std::map<std::pair<std::string, std::string>, int> seen;
  auto apply = [&](const detail::Line& l) {
    try {
      apply_setting(c, l.section, l.key, l.value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(detail::where(file, l.number) + "key '" + l.key + "': " + ex.what());
    }
  };
  for (const auto& l : lines) {
    if (l.section == "deviations") {
      if (l.key != "item") throw ConfigError(detail::where(file, l.number) + "unknown key '" + l.key + "' in section [deviations]");
      c.deviations.push_back(l.value);
      continue;
    }
    const auto id = std::make_pair(l.section, l.key);
    if (seen.count(id))
      throw ConfigError(detail::where(file, l.number) + "duplicate key '" + l.key + "' (first set on line " +
                        std::to_string(seen[id]) + ")");
    seen[id] = l.number;
  }
  for (const auto& l : lines)
    if ((l.section == "plant" && l.key == "model") || (l.section == "controller" && l.key == "controller")) apply(l);
  for (const auto& l : lines) {
    if (l.section == "deviations") continue;
    if ((l.section == "plant" && l.key == "model") || (l.section == "controller" && l.key == "controller")) continue;
    apply(l);
  }
  return c;
}

/// Complete, explicit text form; parse_config(dump_config(c)) == c.
inline std::string dump_config(const RunConfig& c) {
  std::ostringstream out;
  bool first = true;
  for (const auto& section : section_order()) {
    std::vector<std::string> lines;
    if (section == "deviations") {
      for (const auto& d : c.deviations) lines.push_back("item = " + d);
    } else {
      for (const auto& f : schema())
        if (f.section == section && f.applies(c)) lines.push_back(f.key + " = " + f.get(c));
    }
    if (lines.empty()) continue;
    if (!first) out << '\n';
    first = false;
    out << '[' << section << "]\n";
    for (const auto& l : lines) out << l << '\n';
  }
  return out.str();
}

}  // namespace tvec::cli
