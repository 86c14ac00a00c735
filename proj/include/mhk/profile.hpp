#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mhk/dynamics.hpp"

namespace mhk {

// Confidence graph of a profile: vertices are agents, an edge joins i and j
// iff their squared distance is <= epsilon^2 (same predicate the dynamics
// uses, so graph edges and step neighborhoods never disagree).
struct ProfileGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;       // i < j, lexicographic
  std::vector<int> component_of;                // agent -> component id (0-based, by smallest member)
  std::vector<std::vector<int>> components;     // members ascending
  int component_count() const { return static_cast<int>(components.size()); }
};

ProfileGraph build_profile(const OpinionState& s);

// Diameter tests against a threshold delta.  A vertex set is delta-trivial
// when every pair inside it is within delta (squared comparison, inclusive).
// Singleton components are trivially trivial.
struct TrivialityReport {
  double delta = 0.0;
  std::vector<char> component_trivial;
  std::vector<double> component_diameter;  // sqrt of max intra-component pair distance
  bool all_components_trivial = true;
  bool whole_set_trivial = true;           // the entire vertex set as one blob
  double whole_diameter = 0.0;
};

TrivialityReport is_delta_trivial(const ProfileGraph& g, const OpinionState& s, double delta);

// Largest squared distance between two agents sharing a component; 0.0 when
// every component is a singleton.  "All components delta-trivial" is exactly
// this value <= delta^2, which is the scalar the stopping scans threshold
// against.
double max_intra_component_dist2(const ProfileGraph& g, const OpinionState& s);

// Convex-hull summary of one component.
struct HullSummary {
  int component = 0;
  std::vector<int> members;
  std::vector<double> points;  // flattened member opinions, agent-major
  double diameter = 0.0;       // max pairwise member distance
};

std::vector<HullSummary> hull_summaries(const ProfileGraph& g, const OpinionState& s);

// Minimum Euclidean distance between the convex hulls of two point sets
// (flattened, d coordinates per point; both nonempty).
//
// d == 1 is the exact interval gap.  For d >= 2 the distance is computed by
// support-point descent on the Minkowski difference (Gilbert's algorithm
// with exact line search), terminating when the upper/lower distance bounds
// agree to 1e-9; the returned value is within 1e-9 of the true distance.
double hull_distance(std::span<const double> a, std::span<const double> b, int d);

// Is the component partition of the profile a delta-equilibrium?  Requires
// 0 < delta <= epsilon.  Checks, over the component partition only:
//   separation: hull distance between distinct components > epsilon
//               (exact for d = 1; for d >= 2 evaluated as > epsilon + 1e-9
//               to keep the iterative distance from producing false
//               positives at the boundary)
//   cohesion:   every component hull has diameter <= delta
// Other partitions of the opinion set are not searched.
struct EquilibriumReport {
  bool is_equilibrium = false;
  std::vector<int> component_of;
  std::vector<std::pair<int, int>> separation_failures;  // component id pairs
  std::vector<int> cohesion_failures;                    // component ids
};

EquilibriumReport check_delta_equilibrium(const OpinionState& s, double delta);

}  // namespace mhk
