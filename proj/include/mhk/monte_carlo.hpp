#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mhk/scenario.hpp"

namespace mhk {

// Upper bound on the expected number of steps until every component is
// delta-trivial, for schedules drawing i.i.d. support sets that contain a
// partition:  n^10 / (8 (1-gamma)^2 p_min) * (epsilon/delta)^2.
// Throws std::domain_error when the hypotheses (n >= 1, epsilon > 0,
// delta > 0, 0 <= gamma < 1, p_min > 0) fail.
double co1_bound(int n, double epsilon, double delta, double gamma, double min_partition_prob);

// Companion bound on the expected number of windows that still contain a
// nontrivial step:  n^10 / (2 (1-gamma)^2 p_min).
double a_set_bound(int n, double gamma, double min_partition_prob);

struct RunOutcome {
  std::uint64_t run_index = 0;
  std::optional<long> tau_delta;
  long stop_t = 0;                  // step index the run stopped at
  bool certified_stuck = false;     // steady state certified with tau not yet hit
  std::vector<double> final_coords; // state at stop_t, for cross-checks
};

struct EnsembleResult {
  long runs = 0;
  long horizon = 0;
  int n = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double min_partition_prob = 0.0;

  std::vector<RunOutcome> outcomes;              // indexed by run
  std::vector<std::optional<long>> tau_samples;  // parallel to outcomes

  long reached = 0;
  double reached_fraction = 0.0;
  std::optional<double> mean_tau;    // over reached runs only
  std::optional<double> stderr_tau;  // sample standard error of mean_tau
  double bound = 0.0;                // co1_bound for this scenario
  double window_bound = 0.0;         // a_set_bound for this scenario
  std::vector<std::uint64_t> flagged_unreached;  // runs whose hitting time was never observed
  long total_steps = 0;
};

// Simulates `runs` independent seeded trajectories of the scenario and
// collects each run's first step with every component delta-trivial.
// Requires a stochastic schedule (asynchronous or stochastic support); the
// bound formulas are undefined without partition probabilities.  A run stops
// at its hitting time, at a certified steady state (it can never hit after
// that), or at the horizon.  Results are a pure function of (scenario,
// master seed, runs, horizon); `threads` only spreads the work (0 = one
// thread per hardware core).
EnsembleResult run_ensemble(const ScenarioConfig& sc, long runs, long horizon, int threads = 1);

}  // namespace mhk
