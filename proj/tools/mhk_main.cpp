#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mhk/demos.hpp"
#include "mhk/errors.hpp"
#include "mhk/io.hpp"
#include "mhk/monte_carlo.hpp"
#include "mhk/stopping.hpp"
#include "mhk/trajectory.hpp"

namespace {

struct RunArgs {
  std::string scenario;
  std::string out = "mhk_out";
  bool stop_on_termination = false;
  std::optional<long> horizon;
  std::uint64_t run_index = 0;
};

struct McArgs {
  std::string scenario;
  long runs = 0;
  std::optional<long> horizon;
  int threads = 1;
  std::string out;
};

struct AnalyzeArgs {
  std::string trajectory;
  std::optional<double> delta;
  int m_max = 16;
};

int do_run(const RunArgs& args) {
  const mhk::ScenarioConfig sc = mhk::load_scenario(args.scenario);
  mhk::RunOptions opt;
  opt.run_index = args.run_index;
  opt.stop_on_termination = args.stop_on_termination;
  opt.horizon_override = args.horizon;
  const mhk::Trajectory traj = mhk::run_trajectory(sc, opt);

  if (sc.outputs.trajectory) {
    if (sc.outputs.format == "jsonl" || sc.outputs.format == "both") {
      const std::string path = args.out + ".jsonl";
      mhk::export_trajectory_jsonl(traj, path);
      std::cout << "trajectory written: " << path << "\n";
    }
    if (sc.outputs.format == "csv" || sc.outputs.format == "both") {
      const std::string path = args.out + ".csv";
      mhk::export_trajectory_csv(traj, path);
      std::cout << "trajectory written: " << path << "\n";
    }
  }

  const mhk::StoppingReport report = mhk::analyze_stopping(traj);
  const std::string text = mhk::stopping_report_text(report);
  if (sc.outputs.stopping) {
    const std::string path = args.out + ".stopping.json";
    mhk::write_text_file(path, text + "\n");
    std::cout << "stopping report written: " << path << "\n";
  }
  std::cout << text << "\n";
  return 0;
}

int do_mc(const McArgs& args) {
  const mhk::ScenarioConfig sc = mhk::load_scenario(args.scenario);
  const long horizon = args.horizon.value_or(sc.horizon);
  const mhk::EnsembleResult res = mhk::run_ensemble(sc, args.runs, horizon, args.threads);

  if (!args.out.empty()) {
    mhk::write_ensemble_csv(res, args.out + ".ensemble.csv");
    mhk::write_text_file(args.out + ".ensemble.json", mhk::ensemble_report_text(res) + "\n");
    std::cout << "ensemble outputs written: " << args.out << ".ensemble.{csv,json}\n";
  }
  std::cout << mhk::ensemble_report_text(res) << "\n";
  if (!res.flagged_unreached.empty())
    std::cout << "warning: " << res.flagged_unreached.size() << " of " << res.runs
              << " runs did not reach the delta-trivial state within the horizon\n";
  return 0;
}

int do_analyze(const AnalyzeArgs& args) {
  const mhk::Trajectory traj = mhk::load_trajectory(args.trajectory);
  const mhk::TrajectoryAudit audit = mhk::audit_trajectory(traj);
  std::cout << "transitions checked: " << audit.transitions << "\n";
  if (!audit.clean()) {
    std::cout << "integrity violations:\n"
              << "  replay mismatches:        " << audit.replay_mismatches << "\n"
              << "  energy mismatches:        " << audit.z_mismatches << "\n"
              << "  decrement mismatches:     " << audit.decrement_mismatches << "\n"
              << "  bound mismatches:         " << audit.nl8_mismatches << "\n"
              << "  energy increases:         " << audit.energy_increases << "\n"
              << "  descent bound failures:   " << audit.decrement_bound_failures << "\n"
              << "  bounding-box escapes:     " << audit.box_escapes << "\n"
              << "  merge mismatches:         " << audit.merge_mismatches << "\n"
              << "  graph count mismatches:   " << audit.profile_mismatches << "\n";
    return 1;
  }
  std::cout << "integrity: clean (replay, energy, descent, bounds, merges)\n";

  mhk::StoppingConfig cfg;
  if (args.delta) cfg.delta = *args.delta;
  cfg.m_max = args.m_max;
  const mhk::StoppingReport report = mhk::analyze_stopping(traj, cfg);
  std::cout << mhk::stopping_report_text(report) << "\n";
  if (report.equivalences_checked && !report.equivalence_violations.empty()) {
    std::cout << "equivalence violations: " << report.equivalence_violations.size() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opinion-dynamics engine: bounded-confidence averaging with per-step stubbornness"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "simulate one trajectory and write its reports");
  run->add_option("scenario", run_args.scenario, "scenario JSON file")->required();
  run->add_option("--out", run_args.out, "output path prefix (default mhk_out)");
  run->add_flag("--stop-on-termination", run_args.stop_on_termination,
                "stop as soon as the state is a certified fixed point");
  long run_horizon = -1;
  run->add_option("--horizon", run_horizon, "override the scenario horizon");
  run->add_option("--run-index", run_args.run_index,
                  "reproduce this ensemble member's draws (default 0)");

  McArgs mc_args;
  CLI::App* mc = app.add_subcommand("mc", "run a seeded ensemble and summarize hitting times");
  mc->add_option("scenario", mc_args.scenario, "scenario JSON file")->required();
  mc->add_option("--runs", mc_args.runs, "number of independent runs")
      ->required()
      ->check(CLI::PositiveNumber);
  long mc_horizon = -1;
  mc->add_option("--horizon", mc_horizon, "per-run step cap (default: scenario horizon)");
  mc->add_option("--threads", mc_args.threads, "worker threads (0 = hardware)");
  mc->add_option("--out", mc_args.out, "also write <out>.ensemble.csv and <out>.ensemble.json");

  AnalyzeArgs an_args;
  CLI::App* an = app.add_subcommand("analyze", "audit a stored trajectory and recompute reports");
  an->add_option("trajectory", an_args.trajectory, "trajectory JSONL file")->required();
  double an_delta = -1.0;
  an->add_option("--delta", an_delta, "stopping threshold (default: the trajectory's)");
  an->add_option("--m-max", an_args.m_max, "largest m for the tau-hat scan (default 16)");

  std::string demo_name;
  CLI::App* demo = app.add_subcommand("demo", "run a built-in demonstration");
  demo->add_option("name", demo_name, "merge | depart | async-reduction | no-termination")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      if (run_horizon >= 0) run_args.horizon = run_horizon;
      return do_run(run_args);
    }
    if (*mc) {
      if (mc_horizon >= 0) mc_args.horizon = mc_horizon;
      return do_mc(mc_args);
    }
    if (*an) {
      if (an_delta >= 0.0) an_args.delta = an_delta;
      return do_analyze(an_args);
    }
    if (*demo) {
      const bool ok = mhk::run_demo(demo_name, std::cout);
      std::cout << (ok ? "demo checks passed\n" : "demo checks FAILED\n");
      return ok ? 0 : 1;
    }
  } catch (const mhk::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
