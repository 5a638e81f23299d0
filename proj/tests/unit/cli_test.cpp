#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "tvec/cli/app.hpp"

using namespace tvec;
using namespace tvec::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tvec_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "tvec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Config, EveryPresetRoundTripsThroughText) {
  for (const auto& p : preset_catalog()) {
    const RunConfig c = preset_config(p.name);
    const std::string text = dump_config(c);
    const RunConfig back = expand(parse_config(text, p.name + ".ini"));
    EXPECT_EQ(dump_config(back), text) << p.name;
  }
}

TEST(Config, NumbersSurviveBitExactly) {
  RunConfig c = preset_config("example1-ncc");
  c.ncc2d.kp_alpha = 0.1 + 0.2;
  c.scenario.x0 = {1.0 / 3.0, -2e-300, M_PI, 5e-324};
  const RunConfig back = parse_config(dump_config(c));
  EXPECT_EQ(back.ncc2d.kp_alpha, c.ncc2d.kp_alpha);
  EXPECT_EQ(back.scenario.x0, c.scenario.x0);
}

TEST(Config, UnknownKeyNamesFileLineAndKey) {
  const std::string text =
      "[plant]\nmodel = uav2d\n\n[controller]\ncontroller = kpca\n\n[kpca]\nkapa_p = 1\n";
  try {
    parse_config(text, "typo.ini");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("typo.ini:8:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("kapa_p"), std::string::npos) << msg;
  }
}

TEST(Config, ModelSpecificKeyRejectedForOtherModel) {
  const std::string text = "[plant]\nI_p = 700\nmodel = uav2d\n";
  try {
    parse_config(text, "m.ini");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("does not apply"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("m.ini:2:"), std::string::npos) << e.what();
  }
}

TEST(Config, DuplicateKeyAndMalformedLines) {
  EXPECT_THROW(parse_config("[plant]\nmodel = uav2d\nmodel = uav3d\n"), ConfigError);
  EXPECT_THROW(parse_config("[plant\nmodel = uav2d\n"), ConfigError);
  EXPECT_THROW(parse_config("[nowhere]\n"), ConfigError);
  EXPECT_THROW(parse_config("model = uav2d\n"), ConfigError);
  EXPECT_THROW(parse_config("[plant]\nmodel uav2d\n"), ConfigError);
  EXPECT_THROW(parse_config("[plant]\nmodel = helicopter\n"), ConfigError);
}

TEST(Config, DimensionErrorNamesSection) {
  RunConfig c = preset_config("example2-kpca");
  c.scenario.x0.pop_back();
  try {
    expand(c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("[scenario]", 0), 0u) << e.what();
  }
  c = preset_config("example2-kpca");
  c.kpca.Q.push_back(1.0);
  try {
    expand(c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("[kpca]", 0), 0u) << e.what();
  }
  c = preset_config("example3-kpca-kernel");
  c.controller = "ncc2d";
  EXPECT_THROW(expand(c), ConfigError);
}

TEST(Presets, VesselScheduleMatchesStepCommands) {
  const RunConfig c = preset_config("example3-kpca-kernel");
  EXPECT_EQ(c.scenario.schedule_times, (std::vector<double>{0, 15, 30, 45}));
  const std::vector<double> expected{-5, -3, M_PI, 2, 1, -M_PI / 4, -5, 0, M_PI / 4, 0, 0, 0};
  EXPECT_EQ(c.scenario.schedule_values, expected);
  EXPECT_EQ(c.kpca.kappa_p, 1e-6);
  EXPECT_EQ(preset_config("example3-kpca-nokernel").kpca.kappa_p, 0.0);
  EXPECT_THROW(preset_config("example9"), std::invalid_argument);
}

TEST(Presets, EveryPresetListsItsDeviations) {
  for (const auto& p : preset_catalog()) EXPECT_FALSE(preset_config(p.name).deviations.empty()) << p.name;
}

TEST(Report, Example1NccCsvHeader) {
  RunConfig c = preset_config("example1-ncc");
  c.scenario.duration = 0.1;
  const RunResult r = run_config(c);
  EXPECT_EQ(first_line(trajectory_csv(r.log)),
            "t,alpha,alpha_dot,beta,beta_dot,u1,u2,beta_d,eff_ctrl,kernel_dist,delta2_0,delta1_rate_0");
  EXPECT_EQ(r.log.size(), 11u);
}

TEST(Report, SphericalCsvHasIndexedEffectiveControl) {
  RunConfig c = preset_config("example2-ncc");
  c.scenario.duration = 0.05;
  const std::string header = first_line(trajectory_csv(run_config(c).log));
  EXPECT_NE(header.find(",T,tau_x,tau_y,tau_z,q0_d,q1_d,q2_d,q3_d,eff_ctrl_0,eff_ctrl_1,kernel_dist,"), std::string::npos)
      << header;
}

TEST(Report, RerunIsBitIdentical) {
  RunConfig c = preset_config("example1-kpca-bell");
  c.scenario.duration = 1.0;
  EXPECT_EQ(trajectory_csv(run_config(c).log), trajectory_csv(run_config(c).log));
}

TEST(Sweep, EmptyAndNonNumeric) {
  const RunConfig c = preset_config("example2-kpca");
  const fs::path dir = scratch_dir("sweep_errors");
  try {
    run_sweep(c, "kappa_w", {}, dir, 1);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("empty sweep"), std::string::npos);
  }
  try {
    run_sweep(c, "kernel_mode", {"off"}, dir, 1);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("not sweepable"), std::string::npos);
  }
  EXPECT_THROW(run_sweep(c, "kappa_q", {"1"}, dir, 1), std::invalid_argument);
  EXPECT_THROW(run_sweep(c, "kappa_w", {"abc"}, dir, 1), std::invalid_argument);
}

TEST(Sweep, WritesOneRunPerValue) {
  RunConfig c = preset_config("example1-ncc");
  c.scenario.duration = 0.5;
  const fs::path dir = scratch_dir("sweep_runs");
  const json rep = run_sweep(c, "kp_alpha", {"2", "4"}, dir, 2);
  ASSERT_EQ(rep["runs"].size(), 2u);
  EXPECT_EQ(rep["key"], "controller.kp_alpha");
  EXPECT_TRUE(fs::exists(dir / "kp_alpha=2" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir / "kp_alpha=4" / "metrics.json"));
  EXPECT_TRUE(fs::exists(dir / "sweep_report.json"));
  const RunConfig echoed = parse_config(read_text(dir / "kp_alpha=4" / "config.ini"));
  EXPECT_EQ(echoed.ncc2d.kp_alpha, 4.0);
}

TEST(Check, EmptyDirectoryIsNotApplicableEverywhere) {
  const fs::path dir = scratch_dir("check_empty");
  const auto cs = evaluate_criteria(dir, 1);
  ASSERT_EQ(cs.size(), 10u);
  for (const auto& c : cs) EXPECT_EQ(c.flag, Flag::not_applicable) << c.id;
  EXPECT_FALSE(all_pass(cs));
  std::string out;
  EXPECT_NE(invoke({"check", "--out", dir.string()}, &out), 0);
  EXPECT_NE(out.find("not-applicable"), std::string::npos);
}

TEST(Check, NonOscillatingOptimalMappingFailsA2) {
  const fs::path dir = scratch_dir("check_a2");
  RunConfig ncc = preset_config("example1-ncc");
  RunConfig opt = preset_config("example1-optimal-mapping");
  ncc.scenario.duration = opt.scenario.duration = 3.0;
  write_run(run_config(ncc), dir / "example1-ncc");
  json m = write_run(run_config(opt), dir / "example1-optimal-mapping");
  m["oscillating"] = false;
  write_text(dir / "example1-optimal-mapping" / "metrics.json", m.dump(2));
  const auto cs = evaluate_criteria(dir, 1);
  EXPECT_EQ(cs[1].id, "A2");
  EXPECT_EQ(cs[1].flag, Flag::fail);
}

TEST(Probes, KernelIdentityAndGradients) {
  const auto k = probes::kernel_identities(200);
  EXPECT_LE(std::max({k.uav2d, k.uav3d, k.vessel}), 1e-12);
  const auto g = probes::gradient_checks(3);
  EXPECT_LE(std::max({g.example1, g.example2, g.example3}), 1e-6);
  EXPECT_GE(probes::rk4_observed_order(), 3.8);
}

TEST(App, VerbsAndExitCodes) {
  std::string out, err;
  EXPECT_EQ(invoke({"list-presets"}, &out), 0);
  EXPECT_NE(out.find("example2-kpca"), std::string::npos);
  EXPECT_EQ(invoke({"dump-preset", "--preset", "example1-ncc"}, &out), 0);
  EXPECT_EQ(out, dump_config(preset_config("example1-ncc")));
  EXPECT_EQ(invoke({"dump-preset", "--preset", "nope"}, &out, &err), 2);
  EXPECT_NE(err.find("unknown preset"), std::string::npos);
  EXPECT_EQ(invoke({}, &out, &err), 2);
  EXPECT_EQ(invoke({"run", "--out", "x"}, &out, &err), 2);

  const fs::path dir = scratch_dir("app_run");
  const fs::path ini = dir / "short.ini";
  RunConfig c = preset_config("example1-ncc");
  c.scenario.duration = 0.2;
  write_text(ini, dump_config(c));
  EXPECT_EQ(invoke({"run", "--config", ini.string(), "--out", (dir / "run").string()}, &out, &err), 0) << err;
  EXPECT_EQ(read_text(dir / "run" / "config.ini"), read_text(ini));
  EXPECT_TRUE(fs::exists(dir / "run" / "trajectory.csv"));
  EXPECT_FALSE(fs::exists(dir / "run" / "solver_log.csv"));

  EXPECT_EQ(invoke({"sweep", "--config", ini.string(), "--key", "kp_alpha", "--values", "[1, 2]", "--out",
                 (dir / "sw").string()},
                &out, &err),
            0)
      << err;
  EXPECT_TRUE(fs::exists(dir / "sw" / "kp_alpha=1"));
  EXPECT_EQ(invoke({"sweep", "--config", ini.string(), "--key", "kp_alpha", "--values", "--out", (dir / "sw2").string()},
                &out, &err),
            2);
  EXPECT_NE(err.find("empty sweep"), std::string::npos);
}
