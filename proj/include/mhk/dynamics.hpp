#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mhk {

// Opinion profile at one time step: n agents, each a point in R^d, plus the
// confidence radius epsilon shared by all agents.  Coordinates are stored
// flat, agent-major (agent i occupies coords[i*d .. i*d+d-1]).  Treat a
// constructed state as immutable; steps produce fresh states.
struct OpinionState {
  long t = 0;
  int n = 0;
  int d = 1;
  double epsilon = 0.0;
  std::vector<double> coords;

  OpinionState() = default;
  OpinionState(long t, int n, int d, double epsilon, std::vector<double> coords);

  std::span<const double> opinion(int i) const {
    return {coords.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
  }
  double at(int i, int c) const { return coords[static_cast<std::size_t>(i) * d + c]; }
};

// Per-step stubbornness vector.  open_set lists the agents with alpha < 1
// (ascending); everyone else ignores the step entirely.
struct StubbornnessAssignment {
  std::vector<double> alphas;
  std::vector<int> open_set;

  static StubbornnessAssignment from_alphas(std::vector<double> alphas);
};

struct Neighborhood {
  int agent = 0;
  std::vector<int> members;  // ascending, always contains `agent`
};

// Squared Euclidean distance between agents i and j, accumulated in
// coordinate order.  All confidence tests in this project compare squared
// distances against squared radii (d2 <= eps*eps), which keeps the
// boundary case "distance exactly epsilon" an exact IEEE comparison with no
// square root in the way.
double squared_distance(const OpinionState& s, int i, int j);

// Agents within epsilon of each other (inclusive), self always included.
std::vector<Neighborhood> compute_neighborhoods(const OpinionState& s);

// One update of the averaging rule.  Per agent i:
//
//   if alpha_i == 1 or |N_i| == 1:  x_i(t+1) = x_i(t), copied verbatim
//   else, per coordinate:
//     s   = sum of x_j over j in N_i, ascending index order
//     avg = s / |N_i|
//   if avg matches x_i bit-for-bit in every coordinate:
//     x_i(t+1) = x_i(t), copied verbatim.  The agent sits exactly on its
//     neighborhood average, so in real arithmetic it would not move for any
//     alpha; blending would only inject round-off.  This rule is also what
//     lets a state where it holds for everyone be certified as permanently
//     fixed no matter which stubbornness values are drawn later.
//   else, per coordinate:
//     x_i(t+1) = alpha_i * x_i + (1 - alpha_i) * avg
//
// The evaluation order above is frozen: ensemble statistics, merge
// detection, and the export round-trip all rely on step being a pure
// function of its inputs at the bit level.  With alpha_i == 0 the result is
// exactly avg whichever branch is taken (the copy branch fires only when
// x_i already equals avg), so a fully open agent reproduces plain
// neighborhood averaging bit-for-bit.
OpinionState step(const OpinionState& s, const StubbornnessAssignment& a);
OpinionState step(const OpinionState& s, const StubbornnessAssignment& a,
                  const std::vector<Neighborhood>& nbhd);

// Same map expressed through the row-stochastic update matrix
//   W = diag(alpha) + (I - diag(alpha)) A,   A_ij = 1{j in N_i} / |N_i|,
// evaluated as a dense row-times-vector product.  Numerically this takes a
// different path than step (per-row dot products over all n entries), so it
// serves as an independent algebraic cross-check; outputs agree with step
// to 1e-12 per coordinate, not bitwise.
OpinionState step_matrix(const OpinionState& s, const StubbornnessAssignment& a);

// The dense matrix W above, row-major n*n.  Exposed for tests (row sums,
// sparsity structure).
std::vector<double> update_matrix(const OpinionState& s, const StubbornnessAssignment& a);

// Pairs (i, j), i < j, whose opinions are exactly equal in `next` but were
// not exactly equal in `prev`.  Equality is coordinate-wise ==; no
// tolerance.  Pairs that were already equal in `prev` do not reappear.
std::vector<std::pair<int, int>> detect_merge(const OpinionState& prev, const OpinionState& next);

// True when agents i and j hold exactly equal opinions in s.
bool opinions_equal(const OpinionState& s, int i, int j);

}  // namespace mhk
