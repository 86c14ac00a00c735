#include "mhk/demos.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>

#include "mhk/diagnostics.hpp"
#include "mhk/errors.hpp"
#include "mhk/io.hpp"
#include "mhk/rng.hpp"
#include "mhk/stopping.hpp"
#include "mhk/trajectory.hpp"

namespace mhk {

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool rows_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i], b[i])) return false;
  return true;
}

std::string row_text(const std::vector<double>& coords) {
  std::string s = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ", ";
    s += format_shortest(coords[i]);
  }
  return s + ")";
}

bool check(std::ostream& out, bool ok, const std::string& what) {
  out << (ok ? "  [ok] " : "  [FAILED] ") << what << "\n";
  return ok;
}

bool demo_merge(std::ostream& out) {
  ScenarioConfig sc;
  sc.n = 2;
  sc.d = 1;
  sc.epsilon = 0.5;
  sc.delta = 0.01;
  sc.horizon = 1;
  sc.master_seed = 1;
  sc.initial = std::vector<double>{0.0, 0.5};
  sc.schedule.kind = ScheduleKind::Synchronous;

  const Trajectory traj = run_trajectory(sc);
  out << "two agents, epsilon = 0.5, everyone averages:\n";
  out << "  x(0) = " << row_text(traj.steps[0].coords) << "\n";
  out << "  x(1) = " << row_text(traj.steps[1].coords) << "\n";
  for (const auto& [i, j] : traj.steps[1].merges)
    out << "  merge at t = 1: agents " << i + 1 << "-" << j + 1 << "\n";

  bool ok = true;
  ok &= check(out, rows_equal(traj.steps[1].coords, {0.25, 0.25}),
              "x(1) is exactly (0.25, 0.25)");
  ok &= check(out, traj.steps[1].merges == std::vector<std::pair<int, int>>{{0, 1}},
              "exactly one merge event, at t = 1");
  return ok;
}

bool demo_depart(std::ostream& out) {
  ScenarioConfig sc;
  sc.n = 3;
  sc.d = 1;
  sc.epsilon = 1.0;
  sc.delta = 0.01;
  sc.horizon = 50;
  sc.master_seed = 1;
  sc.initial = std::vector<double>{0.0, 0.0, 1.0};
  sc.schedule.kind = ScheduleKind::Scripted;
  sc.schedule.scripted.assign(50, {1.0, 0.0, 1.0});

  const Trajectory traj = run_trajectory(sc);
  out << "agents 1 and 2 start merged at 0, agent 3 sits at 1; only agent 2 listens:\n";
  out << "  x(0) = " << row_text(traj.steps[0].coords) << "\n";
  out << "  x(1) = " << row_text(traj.steps[1].coords) << "\n";
  out << "  x(50) = " << row_text(traj.steps[50].coords) << "\n";

  double expected_mid = 0.0;
  expected_mid += 0.0;
  expected_mid += 0.0;
  expected_mid += 1.0;
  expected_mid /= 3.0;

  bool ok = true;
  ok &= check(out, traj.steps[0].coords[0] == traj.steps[0].coords[1],
              "agents 1 and 2 coincide at t = 0");
  ok &= check(out, rows_equal(traj.steps[1].coords, {0.0, expected_mid, 1.0}),
              "x(1) = (0, 1/3, 1): the pair separates after one step");
  bool edges_constant = true;
  for (const StepRecord& rec : traj.steps)
    edges_constant = edges_constant && rec.edge_count == 3 && rec.component_count == 1;
  ok &= check(out, edges_constant, "confidence graph stays complete at every step");
  const StoppingReport rep = analyze_stopping(traj);
  ok &= check(out, rep.last_state_change >= 30,
              "opinions keep moving past step 30 while the graph never changes");
  out << "  (bitwise motion stops at step " << rep.last_state_change
      << "; agent 2 approaches 0.5 geometrically)\n";
  return ok;
}

bool demo_async_reduction(std::ostream& out) {
  out << "one uniformly random open agent per step, run twice per scenario:\n"
         "once dedicated, once as singleton support sets with probability 1/n:\n";
  const RngStream gen(20260816);
  bool ok = true;
  for (int s = 0; s < 20; ++s) {
    auto draws = gen.at(static_cast<std::uint64_t>(s));
    const int n = 2 + static_cast<int>(draws.next_u64() % 5);
    const int d = 1 + static_cast<int>(draws.next_u64() % 2);
    const double eps = 0.2 + draws.next_unit() * 0.6;
    std::vector<double> coords(static_cast<std::size_t>(n) * d);
    for (double& v : coords) v = draws.next_unit();

    ScenarioConfig a;
    a.n = n;
    a.d = d;
    a.epsilon = eps;
    a.delta = 0.01;
    a.horizon = 30;
    a.master_seed = 777 + static_cast<std::uint64_t>(s);
    a.initial = coords;
    a.schedule.kind = ScheduleKind::Asynchronous;

    ScenarioConfig b = a;
    b.schedule.kind = ScheduleKind::StochasticSupport;
    for (int i = 0; i < n; ++i) {
      b.schedule.support.push_back({{i}, 1.0 / static_cast<double>(n)});
      b.schedule.partition_indices.push_back(i);
    }
    b.schedule.open_alpha = {0.0, 0.0};

    const Trajectory ta = run_trajectory(a);
    const Trajectory tb = run_trajectory(b);
    bool match = ta.steps.size() == tb.steps.size();
    for (std::size_t idx = 0; match && idx < ta.steps.size(); ++idx)
      match = rows_equal(ta.steps[idx].coords, tb.steps[idx].coords) &&
              rows_equal(ta.steps[idx].alphas, tb.steps[idx].alphas);
    ok &= check(out, match,
                "scenario " + std::to_string(s + 1) + " (n=" + std::to_string(n) +
                    ", d=" + std::to_string(d) + "): 31 states bit-identical");
  }
  return ok;
}

bool demo_no_termination(std::ostream& out) {
  const int kHorizon = 48;
  const int kRows = 80;
  ScenarioConfig sc;
  sc.n = 3;
  sc.d = 1;
  sc.epsilon = 1.0;
  sc.delta = 0.01;
  sc.horizon = kRows;
  sc.master_seed = 1;
  sc.initial = std::vector<double>{0.0, 0.9, 1.8};
  sc.schedule.kind = ScheduleKind::Scripted;
  for (int t = 0; t < kRows; ++t) {
    const double alpha = 1.0 - std::ldexp(1.0, -t);
    sc.schedule.scripted.push_back({alpha, alpha, alpha});
  }

  RunOptions opt;
  opt.horizon_override = kHorizon;
  const Trajectory traj = run_trajectory(sc, opt);
  out << "three agents in a line, everyone's stubbornness ramps as 1 - 2^-t:\n";
  out << "  x(0) = " << row_text(traj.steps[0].coords) << "\n";
  out << "  x(1) = " << row_text(traj.steps[1].coords) << "\n";
  out << "  x(" << kHorizon << ") = " << row_text(traj.steps.back().coords) << "\n";

  std::vector<double> expected(3);
  {
    double s01 = 0.0;
    s01 += 0.0;
    s01 += 0.9;
    expected[0] = s01 / 2.0;
    double s012 = 0.0;
    s012 += 0.0;
    s012 += 0.9;
    s012 += 1.8;
    expected[1] = s012 / 3.0;
    double s12 = 0.0;
    s12 += 0.9;
    s12 += 1.8;
    expected[2] = s12 / 2.0;
  }

  bool ok = true;
  ok &= check(out, rows_equal(traj.steps[1].coords, expected),
              "step 0 has stubbornness 0, so x(1) is the plain neighborhood average");

  bool moved_every_step = true;
  bool no_merges = true;
  for (std::size_t idx = 1; idx < traj.steps.size(); ++idx) {
    moved_every_step =
        moved_every_step && !rows_equal(traj.steps[idx].coords, traj.steps[idx - 1].coords);
    no_merges = no_merges && traj.steps[idx].merges.empty();
  }
  ok &= check(out, moved_every_step, "the state changes at every one of the 48 steps");
  ok &= check(out, no_merges, "no two opinions ever collide");

  const TerminationVerdict term = detect_termination(traj);
  ok &= check(out, !term.time.has_value(), "no steady state is reached by the horizon");

  // Motion budget per agent: summable, so each opinion converges even though
  // no step ever reaches a fixed state.
  std::vector<ConvergenceTracker> trackers;
  for (int i = 0; i < sc.n; ++i) trackers.emplace_back(i);
  for (std::size_t idx = 0; idx + 1 < traj.steps.size(); ++idx) {
    const OpinionState state = traj.state_at(idx);
    const StubbornnessAssignment assn = traj.assignment_at(idx);
    const auto nbhd = compute_neighborhoods(state);
    for (auto& tr : trackers) tr.observe(state, assn, nbhd);
  }
  bool sums_converge = true;
  long onset = -1;
  for (const auto& tr : trackers) {
    const auto& s = tr.summands();
    long first_small = -1;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] < 1e-12) {
        if (first_small < 0) first_small = static_cast<long>(k);
      } else {
        first_small = -1;
      }
    }
    sums_converge = sums_converge && first_small >= 0 && first_small <= 60;
    onset = std::max(onset, first_small);
    out << "  agent " << tr.agent() + 1 << ": motion budget " << format_shortest(tr.partial_sum())
        << ", increments below 1e-12 from step " << first_small << "\n";
  }
  ok &= check(out, sums_converge, "every motion budget converges (increments < 1e-12 by step 60)");

  double tail = 0.0;
  for (std::size_t idx = 31; idx < traj.steps.size(); ++idx)
    for (std::size_t k = 0; k < traj.steps[idx].coords.size(); ++k)
      tail += std::abs(traj.steps[idx].coords[k] - traj.steps[idx - 1].coords[k]);
  out << "  displacement after step 30, all agents: " << format_shortest(tail) << "\n";
  ok &= check(out, tail < 1e-8, "tail displacement beyond step 30 is below 1e-8");

  const Trajectory longer = run_trajectory(sc);
  const StoppingReport longer_rep = analyze_stopping(longer);
  out << "  note: in exact arithmetic this ramp never stops; IEEE rounding freezes the bits at\n"
         "  step "
      << longer_rep.last_state_change << ", and the " << kHorizon
      << "-step horizon stays safely below that.\n";
  return ok;
}

}  // namespace

std::vector<std::string> demo_names() {
  return {"merge", "depart", "async-reduction", "no-termination"};
}

bool run_demo(const std::string& name, std::ostream& out) {
  if (name == "merge") return demo_merge(out);
  if (name == "depart") return demo_depart(out);
  if (name == "async-reduction") return demo_async_reduction(out);
  if (name == "no-termination") return demo_no_termination(out);
  std::ostringstream names;
  for (const auto& n : demo_names()) names << ' ' << n;
  throw ConfigError("unknown demo '" + name + "'; available:" + names.str());
}

}  // namespace mhk
