#pragma once

// Command-line verbs: run, sweep, check, list-presets, dump-preset.
// Exit codes: 0 success, 1 failed check or integration failure, 2 usage or
// configuration error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tvec/cli/acceptance.hpp"

namespace tvec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

namespace app_detail {

inline RunConfig load_config(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty() && !preset.empty()) throw std::invalid_argument("give either --config or --preset, not both");
  if (!preset.empty()) return preset_config(preset);
  if (config_path.empty()) throw std::invalid_argument("one of --config or --preset is required");
  return expand(parse_config(read_text(config_path), config_path));
}

/// Accepts "0.1,1,10", "[0.1, 1, 10]" or repeated --values flags.
inline std::vector<std::string> split_values(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (std::string s : raw) {
    s = detail::trim(s);
    if (!s.empty() && s.front() == '[') s.erase(0, 1);
    if (!s.empty() && s.back() == ']') s.pop_back();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (!item.empty()) out.push_back(item);
    }
  }
  return out;
}

}  // namespace app_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Kernel-based predictive control allocation: scenarios, sweeps and acceptance checks"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir, key;
  std::vector<std::string> values;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "run one scenario, or every preset with --preset all");
  run->add_option("--config", config_path, "scenario config file");
  run->add_option("--preset", preset, "built-in preset name, or 'all' for the acceptance set");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--jobs", jobs, "parallel runs for --preset all")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "one run per value of a numeric key");
  sweep->add_option("--config", config_path, "scenario config file");
  sweep->add_option("--preset", preset, "built-in preset name");
  sweep->add_option("--key", key, "key to sweep, e.g. kappa_w or kpca.kappa_w")->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->expected(0, -1);
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--jobs", jobs, "parallel sub-runs")->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check", "evaluate the acceptance criteria on a results directory");
  check->add_option("--out", out_dir, "results directory written by 'run --preset all'")->required();
  check->add_option("--jobs", jobs, "parallel re-runs for the determinism check")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-presets", "print the preset catalog");
  auto* dump = app.add_subcommand("dump-preset", "print a preset as a complete config file");
  dump->add_option("--preset", preset, "preset name")->required();
  dump->add_option("--out", out_dir, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list->parsed()) {
      for (const auto& p : preset_catalog())
        out << p.name << "  " << p.summary << (p.sweep_key.empty() ? "" : " (sweepable: " + p.sweep_key + ")") << "\n";
      return kExitOk;
    }
    if (dump->parsed()) {
      const std::string text = dump_config(preset_config(preset));
      if (out_dir.empty()) out << text;
      else write_text(out_dir, text);
      return kExitOk;
    }
    if (run->parsed()) {
      if (preset == "all" && config_path.empty()) {
        run_acceptance_set(out_dir, jobs);
        out << "wrote acceptance runs to " << out_dir << "\n";
        return kExitOk;
      }
      const RunConfig cfg = app_detail::load_config(config_path, preset);
      const RunResult r = run_config(cfg);
      const json m = write_run(r, out_dir);
      out << cfg.scenario.name << ": " << r.log.size() << " samples, " << m["runtime_s"].get<double>() << " s\n";
      if (r.log.failed_at) {
        err << "integration failed at step " << *r.log.failed_at << ": " << r.log.failure << "\n";
        return kExitFailure;
      }
      return kExitOk;
    }
    if (sweep->parsed()) {
      const RunConfig cfg = app_detail::load_config(config_path, preset);
      const json rep = run_sweep(cfg, key, app_detail::split_values(values), out_dir, jobs);
      for (const auto& row : rep["runs"])
        out << rep["key"].get<std::string>() << " = " << row["value"].get<double>()
            << "  peak_count = " << row["peak_count"].get<int>() << "\n";
      out << "peak_count non-increasing: " << (rep["peak_count_non_increasing"].get<bool>() ? "yes" : "no") << "\n";
      return kExitOk;
    }
    if (check->parsed()) {
      const auto criteria = evaluate_criteria(out_dir, jobs);
      out << criteria_table(criteria);
      return all_pass(criteria) ? kExitOk : kExitFailure;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace tvec::cli
