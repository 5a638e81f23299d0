#pragma once

// Writing run directories, parameter sweeps, parallel dispatch.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tvec/cli/presets.hpp"
#include "tvec/cli/report.hpp"

namespace tvec::cli {

namespace fs = std::filesystem;

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// trajectory.csv, solver_log.csv (KPCA only), metrics.json, config.ini.
inline json write_run(const RunResult& run, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "trajectory.csv", trajectory_csv(run.log));
  if (run.log.has_solver) write_text(dir / "solver_log.csv", solver_csv(run.log));
  const Metrics m = compute_metrics(run);
  json j = metrics_json(run, m);
  write_text(dir / "metrics.json", j.dump(2) + "\n");
  write_text(dir / "config.ini", dump_config(run.config));
  return j;
}

/// Run `tasks` on up to `jobs` threads. The first exception is rethrown after
/// all threads finish.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

/// Resolve a sweep key: `section.key`, or a bare key that matches exactly one
/// field applicable to the config. Only numeric scalars can be swept.
inline const Field& sweep_field(const RunConfig& c, const std::string& key) {
  std::vector<const Field*> hits;
  const auto dot = key.find('.');
  for (const auto& f : schema()) {
    if (!f.applies(c)) continue;
    const bool match = dot == std::string::npos ? f.key == key : f.section + "." + f.key == key;
    if (match) hits.push_back(&f);
  }
  if (hits.empty()) throw std::invalid_argument("unknown sweep key '" + key + "'");
  if (hits.size() > 1) throw std::invalid_argument("ambiguous sweep key '" + key + "'; use section.key");
  if (hits.front()->kind != FieldKind::number && hits.front()->kind != FieldKind::integer)
    throw std::invalid_argument("key '" + key + "' is not sweepable (numeric scalars only)");
  return *hits.front();
}

/// One sub-run per value under out/<key>=<value>/, plus sweep_report.json.
inline json run_sweep(const RunConfig& base, const std::string& key, const std::vector<std::string>& values,
                      const fs::path& out, int jobs) {
  if (values.empty()) throw std::invalid_argument("empty sweep");
  const Field& field = sweep_field(base, key);
  std::vector<RunConfig> configs;
  for (const auto& v : values) {
    RunConfig c = base;
    try {
      field.set(c, v);
    } catch (const std::invalid_argument& ex) {
      throw std::invalid_argument("sweep value for '" + key + "': " + ex.what());
    }
    c.scenario.name = base.scenario.name + "-" + field.key + "-" + v;
    configs.push_back(expand(c));
  }
  std::vector<json> reports(configs.size());
  parallel_for(configs.size(), jobs, [&](std::size_t i) {
    const RunResult r = run_config(configs[i]);
    reports[i] = write_run(r, out / (field.key + "=" + values[i]));
  });

  json rep;
  rep["base"] = base.scenario.name;
  rep["key"] = field.section + "." + field.key;
  json rows = json::array();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const json& m = reports[i];
    json row;
    row["value"] = std::stod(field.get(configs[i]));
    row["dir"] = field.key + "=" + values[i];
    row["peak_count"] = m["peak_count"];
    json settle = json::array(), ends = json::array();
    for (const auto& ch : m["channels"]) {
      settle.push_back(ch["settling_time"]);
      ends.push_back(ch["interval_end_error"]);
    }
    row["settling_time"] = settle;
    row["interval_end_error"] = ends;
    row["oscillating"] = m["oscillating"];
    row["thrust_effort"] = m["thrust_effort"];
    row["bounds_violations"] = m["bounds_violations"];
    row["runtime_s"] = m["runtime_s"];
    rows.push_back(row);
  }
  rep["runs"] = rows;

  std::vector<std::pair<double, int>> trend;
  for (const auto& r : rows) trend.emplace_back(r["value"].get<double>(), r["peak_count"].get<int>());
  std::sort(trend.begin(), trend.end());
  bool non_increasing = true;
  for (std::size_t i = 1; i < trend.size(); ++i) non_increasing = non_increasing && trend[i].second <= trend[i - 1].second;
  rep["peak_count_non_increasing"] = non_increasing;
  fs::create_directories(out);
  write_text(out / "sweep_report.json", rep.dump(2) + "\n");
  return rep;
}

}  // namespace tvec::cli
