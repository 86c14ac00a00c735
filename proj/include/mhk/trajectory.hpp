#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mhk/diagnostics.hpp"
#include "mhk/dynamics.hpp"
#include "mhk/scenario.hpp"

namespace mhk {

// One stored simulation step.  alphas/open_set/decrement/nl8_bound describe
// the transition t -> t+1 and are absent on the final record; merges lists
// the pairs that became exactly equal at t.
struct StepRecord {
  long t = 0;
  std::vector<double> coords;
  std::vector<double> alphas;
  std::vector<int> open_set;
  int edge_count = 0;
  int component_count = 0;
  double z = 0.0;
  std::optional<double> decrement;
  std::optional<double> nl8_bound;
  std::vector<std::pair<int, int>> merges;
};

struct Trajectory {
  int n = 0;
  int d = 1;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t master_seed = 0;
  ScheduleKind schedule_kind = ScheduleKind::Synchronous;
  std::vector<StepRecord> steps;
  // Earliest step at which every agent's neighborhood average equals its own
  // opinion exactly.  Such a state is a fixed point of the update under any
  // stubbornness assignment, so the trajectory is provably constant from
  // here on (not merely constant up to the horizon).
  std::optional<long> steady_from;

  long horizon() const { return steps.empty() ? -1 : steps.back().t; }
  OpinionState state_at(std::size_t idx) const;
  StubbornnessAssignment assignment_at(std::size_t idx) const;
};

struct RunOptions {
  std::uint64_t run_index = 0;
  bool stop_on_termination = false;  // stop early once the state is a certified fixed point
  std::optional<long> horizon_override;
};

// Simulate a scenario and keep every step.  Intended for desk-scale runs,
// exports, and analysis; the ensemble driver uses a streaming path instead.
Trajectory run_trajectory(const ScenarioConfig& sc, const RunOptions& opt = {});

// True when every agent's neighborhood average coincides exactly with its
// opinion (the schedule-independent steady-state test used above).
bool is_steady_state(const OpinionState& s, const std::vector<Neighborhood>& nbhd);

// Integrity and invariant audit of a stored trajectory: replays each
// transition through step() and compares bitwise, recomputes the energy
// diagnostics and compares bitwise, and checks the descent / decrement /
// bounding-box / merge-bookkeeping invariants (inequalities with 1e-9
// slack, since round-off may leak an ulp past the real-arithmetic bound).
struct TrajectoryAudit {
  long transitions = 0;
  long replay_mismatches = 0;
  long z_mismatches = 0;
  long decrement_mismatches = 0;
  long nl8_mismatches = 0;
  long energy_increases = 0;        // z(t+1) > z(t) + 1e-9
  long decrement_bound_failures = 0;  // decrement < nl8_bound - 1e-9
  long box_escapes = 0;             // coordinate outside previous bounding box + 1e-9
  long merge_mismatches = 0;
  long profile_mismatches = 0;      // stored edge/component counts vs recomputed graph
  bool clean() const {
    return replay_mismatches == 0 && z_mismatches == 0 && decrement_mismatches == 0 &&
           nl8_mismatches == 0 && energy_increases == 0 && decrement_bound_failures == 0 &&
           box_escapes == 0 && merge_mismatches == 0 && profile_mismatches == 0;
  }
};

TrajectoryAudit audit_trajectory(const Trajectory& traj);

}  // namespace mhk
