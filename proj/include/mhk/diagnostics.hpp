#pragma once

#include <optional>
#include <vector>

#include "mhk/dynamics.hpp"

namespace mhk {

// Energy of a profile:
//   Z = sum over ordered pairs (i, j), diagonal included, of
//       min(||x_i - x_j||^2, epsilon^2).
// Bounded by n^2 * epsilon^2; nonincreasing along trajectories of the
// averaging rule.  Summed i-major, j ascending, so the value is a pure
// function of the state bits.
double energy(const OpinionState& s);

// Lower bound on the energy drop across one transition prev -> next, where
// next = step(prev, a):
//   4 * sum_i w_i * ||x_i(next) - x_i(prev)||^2,
//   w_i = 1 + |N_i| * alpha_i / (1 - alpha_i)   (alpha_i < 1)
//   w_i = 1                                     (alpha_i == 1; displacement 0)
// Neighborhoods are recomputed from prev.
double nl8_decrement_bound(const OpinionState& prev, const OpinionState& next,
                           const StubbornnessAssignment& a);
double nl8_decrement_bound(const OpinionState& prev, const OpinionState& next,
                           const StubbornnessAssignment& a,
                           const std::vector<Neighborhood>& nbhd);

// Contraction coefficient of an assignment, evaluated literally:
//   max over ordered pairs (i, j) with alpha_i >= alpha_j of
//       alpha_i - (alpha_i - alpha_j) / n.
// beta admits i == j (and therefore always equals max alpha); beta_strict
// restricts to i != j and needs n >= 2.
double beta(const StubbornnessAssignment& a);
double beta_strict(const StubbornnessAssignment& a);

// Per-transition energy diagnostics, as exported with trajectories.
struct EnergyRecord {
  long t = 0;
  double z = 0.0;
  std::optional<double> decrement;  // z(t) - z(t+1); absent on the final state
  std::optional<double> nl8_bound;
};

// Running check that one agent's motion budget is summable: accumulates
//   (1 - alpha_i(t)) * (1 - 1/|N_i(t)|) * max_{j in N_i(t)} ||x_i - x_j||
// per observed step.  When the partial sums converge the agent's opinion
// sequence has a limit; recent opinions are kept for Cauchy checks.
class ConvergenceTracker {
 public:
  ConvergenceTracker(int agent, std::size_t window_capacity = 128)
      : agent_(agent), window_capacity_(window_capacity) {}

  // Call with the state at time t and the assignment applied at t, before
  // stepping.
  void observe(const OpinionState& s, const StubbornnessAssignment& a,
               const std::vector<Neighborhood>& nbhd);

  int agent() const { return agent_; }
  double partial_sum() const { return partial_sum_; }
  const std::vector<double>& summands() const { return summands_; }
  // Sliding window of recent opinions (flattened, oldest first).
  const std::vector<std::vector<double>>& window() const { return window_; }

 private:
  int agent_;
  std::size_t window_capacity_;
  double partial_sum_ = 0.0;
  std::vector<double> summands_;
  std::vector<std::vector<double>> window_;
};

}  // namespace mhk
