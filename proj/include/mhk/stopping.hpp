#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mhk/trajectory.hpp"

namespace mhk {

// Configuration for the stopping-time scans.  delta drives tau_delta and the
// interaction-equivalence audit; the m range drives tau_hat, the freeze scan,
// and the nontrivial-step windows.  delta == 0 in analyze_stopping means
// "use the trajectory's own delta".
struct StoppingConfig {
  double delta = 0.0;
  int m_min = 4;
  int m_max = 16;
  bool check_equivalences = true;  // applied only when delta <= epsilon / 4
};

// Per-step inputs to the streaming scanner.  All "vs previous" flags must be
// false at t = 0.  max_comp_dist2 is the largest squared distance within any
// single component (max_intra_component_dist2).
struct StepFacts {
  long t = 0;
  double max_comp_dist2 = 0.0;
  bool edges_changed = false;          // edge set differs from step t-1
  bool cross_component_edge = false;   // an edge at t joins two components of step t-1
  bool state_changed = false;          // any coordinate differs bitwise from step t-1
  bool steady_certified = false;       // is_steady_state holds at t
  std::vector<std::pair<int, int>> merges;  // pairs newly equal at t
};

// One failed three-way equivalence at a transition whose premise held: every
// component at step t was delta-trivial, yet the conditions
//   (1) some component at t+1 is delta-nontrivial
//   (2) two components of step t interact at t+1
//   (3) some component at t+1 is (epsilon/2)-nontrivial
// did not agree.
struct EquivalenceViolation {
  long t = 0;
  bool delta_nontrivial_next = false;
  bool components_interact = false;
  bool half_eps_nontrivial_next = false;
};

// Observed window [tau_hat_m, tau_hat_{m+1}) and the steps inside it where
// some component was still (epsilon/m)-nontrivial.  An absent end means the
// next threshold was never hit, so the window runs to the horizon and the
// count is horizon-relative.
struct AWindow {
  int m = 0;
  std::optional<long> start;
  std::optional<long> end;
  long nontrivial_steps = 0;
  std::optional<long> first_nontrivial;
};

struct StoppingReport {
  double epsilon = 0.0;
  double delta = 0.0;
  int m_min = 4;
  int m_max = 16;
  long horizon = 0;  // last observed step index; every verdict is relative to it

  std::optional<long> tau_delta;
  std::vector<std::optional<long>> tau_hat;  // index k holds tau_hat for m = m_min + k
  std::vector<std::pair<long, std::pair<int, int>>> merge_times;

  std::optional<int> freeze_m;      // smallest m with the edge set constant on [tau_hat_m, horizon]
  std::optional<long> freeze_from;  // tau_hat at freeze_m
  long last_edge_change = 0;        // 0 when the edge set never changed
  long last_state_change = 0;       // 0 when no coordinate ever changed

  std::optional<long> termination_time;        // onset of the constant suffix, see below
  std::optional<long> certified_steady_from;   // first step passing is_steady_state

  std::vector<EquivalenceViolation> equivalence_violations;
  bool equivalences_checked = false;

  std::vector<AWindow> a_windows;
  std::vector<long> a_set;  // first nontrivial step of each nonempty window, ascending

  std::optional<long> tau_hat_at(int m) const;
};

// Streaming scan over per-step facts.  Feed observe() with t = 0, 1, 2, ...
// then call finish() exactly once.
//
// Termination convention: the state "terminates" at the first step of the
// maximal constant suffix, and a bare suffix of length one (a change at the
// final observed step) does not count, because a single observation confirms
// nothing.  A certified steady state overrides that caution: steadiness is a
// schedule-independent fixed-point certificate, so the suffix provably
// extends past any horizon.
class StoppingScanner {
 public:
  StoppingScanner(const StoppingConfig& cfg, double epsilon);

  void observe(const StepFacts& facts);
  StoppingReport finish();

 private:
  StoppingConfig cfg_;
  double epsilon_;
  double delta2_;
  double half_eps2_;
  bool equivalences_active_;
  std::vector<double> thr2_;  // (epsilon/m)^2 for m = m_min .. m_max+1
  long expect_t_ = 0;
  double prev_max_dist2_ = 0.0;
  std::optional<long> tau_delta_;
  std::vector<std::optional<long>> tau_hat_;  // parallel to thr2_
  std::vector<long> window_count_;
  std::vector<std::optional<long>> window_first_;
  long last_edge_change_ = 0;
  long last_state_change_ = 0;
  std::optional<long> first_steady_;
  std::vector<std::pair<long, std::pair<int, int>>> merge_times_;
  std::vector<EquivalenceViolation> violations_;
  bool finished_ = false;
};

// Whole-trajectory analysis: replays the stored states through the scanner.
// Merge lists are taken from the records as stored (audit_trajectory is the
// place that cross-checks them against the states).
StoppingReport analyze_stopping(const Trajectory& traj, const StoppingConfig& cfg = {});

// First step at which every component is delta-trivial, scanning from t = 0.
std::optional<long> detect_tau_delta(const Trajectory& traj, double delta);

struct FreezeVerdict {
  std::optional<int> m;
  std::optional<long> from;
  long last_edge_change = 0;
};

FreezeVerdict detect_freeze(const Trajectory& traj, int m_min = 4, int m_max = 16);

struct TerminationVerdict {
  std::optional<long> time;
  std::optional<long> certified_from;
};

TerminationVerdict detect_termination(const Trajectory& traj);

// The three-way equivalence audit alone.  Requires 0 < delta <= epsilon/4;
// expected to return an empty list on every trajectory.
std::vector<EquivalenceViolation> check_interaction_equivalences(const Trajectory& traj,
                                                                 double delta);

}  // namespace mhk
