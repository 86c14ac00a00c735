#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mhk/dynamics.hpp"
#include "mhk/rng.hpp"

namespace mhk {

enum class ScheduleKind { Synchronous, Asynchronous, Scripted, StochasticSupport };

std::string to_string(ScheduleKind k);

// Stubbornness for the agents opened at a step.  lo == hi means the constant
// value; otherwise alphas are drawn uniformly from [lo, hi), one per open
// agent.  hi < 1 always: an "open" agent must actually move.
struct OpenAlphaPolicy {
  double lo = 0.0;
  double hi = 0.0;
  bool is_constant() const { return lo == hi; }
};

// One admissible open set, with agent indices 0-based and ascending.
struct SupportElement {
  std::vector<int> members;
  double probability = 0.0;
};

// Which agents are open at each step.
//   Synchronous:        everyone open, alpha = 0 (plain averaging).
//   Asynchronous:       one uniformly random agent open with alpha = 0.
//   Scripted:           explicit alpha row per step, no randomness.
//   StochasticSupport:  an i.i.d. draw from `support`; partition_indices
//                       marks the elements forming a partition of the agent
//                       set (the coverage the stopping-time bound needs).
struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Synchronous;
  std::vector<std::vector<double>> scripted;  // Scripted only: row t = alphas at step t
  std::vector<SupportElement> support;        // StochasticSupport only
  std::vector<int> partition_indices;         // indices into `support`
  OpenAlphaPolicy open_alpha;                 // StochasticSupport only
  std::uint64_t seed = 0;

  // Full structural validation against an agent count.  Throws ConfigError
  // with a description of the offending field.
  void validate(int n) const;
};

// The asynchronous schedule is literally the stochastic-support schedule
// over singletons {{0}, ..., {n-1}} with uniform probabilities and constant
// open alpha 0.  next_assignment routes Asynchronous through this
// conversion, so the two kinds consume identical draw sequences and produce
// identical trajectories under a shared seed.
ScheduleSpec as_stochastic_support(const ScheduleSpec& async_spec, int n);

// Stubbornness assignment for step t.  Draw order within a step is fixed:
// first the support element (one unit draw), then one unit draw per open
// agent in ascending index order when open_alpha is an interval.  Constant
// policies draw nothing for the alphas.  Synchronous and Scripted consume
// no randomness at all.
StubbornnessAssignment next_assignment(const ScheduleSpec& spec, long t, int n,
                                       const RngStream& stream);

// Smallest probability among the partition elements.  Usage error unless
// kind == StochasticSupport (convert Asynchronous first).
double min_partition_probability(const ScheduleSpec& spec);

// Supremum of the open-agent alphas the schedule can emit.
//   Synchronous / Asynchronous -> 0
//   StochasticSupport          -> constant value, or interval hi
//   Scripted                   -> max over scripted entries < 1 (0 if none)
// Returns nullopt only when no finite bound below 1 exists; a finite script
// always has one, so the marker is reserved for future schedule kinds whose
// open alphas can approach 1.
std::optional<double> gamma_bound(const ScheduleSpec& spec);

// Index selection by cumulative probability scan: first k with u < cum[k],
// else the last element.  Exposed for tests.
int select_by_cumulative(double u, const std::vector<double>& cumulative);

// Allocation-free core of the stochastic draw: consumes the step-t draw
// sequence in the frozen order above and overwrites `alphas` (sized n) with
// 1.0 everywhere except the selected support element's members.  `cumulative`
// must hold the left-to-right partial sums of the support probabilities.
// next_assignment routes through this, so ensemble fast paths that call it
// directly reproduce next_assignment bit-for-bit.  Returns the index of the
// selected support element.
int stochastic_alphas_into(const ScheduleSpec& spec, long t, const RngStream& stream,
                           const std::vector<double>& cumulative, std::vector<double>& alphas);

// The partial-sum vector stochastic_alphas_into expects.
std::vector<double> support_cumulative(const ScheduleSpec& spec);

}  // namespace mhk
