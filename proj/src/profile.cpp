#include "mhk/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mhk/errors.hpp"

namespace mhk {

namespace {

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

ProfileGraph build_profile(const OpinionState& s) {
  ProfileGraph g;
  g.n = s.n;
  const double eps2 = s.epsilon * s.epsilon;
  std::vector<int> parent(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i) parent[i] = i;
  for (int i = 0; i < s.n; ++i) {
    for (int j = i + 1; j < s.n; ++j) {
      if (squared_distance(s, i, j) <= eps2) {
        g.edges.emplace_back(i, j);
        int ri = find_root(parent, i), rj = find_root(parent, j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  g.component_of.assign(static_cast<std::size_t>(s.n), -1);
  for (int i = 0; i < s.n; ++i) {
    int r = find_root(parent, i);
    if (g.component_of[r] < 0) {
      g.component_of[r] = static_cast<int>(g.components.size());
      g.components.emplace_back();
    }
    g.component_of[i] = g.component_of[r];
    g.components[g.component_of[i]].push_back(i);
  }
  return g;
}

TrivialityReport is_delta_trivial(const ProfileGraph& g, const OpinionState& s, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("is_delta_trivial: delta must be > 0");
  TrivialityReport r;
  r.delta = delta;
  const double delta2 = delta * delta;
  r.component_trivial.assign(g.components.size(), 1);
  r.component_diameter.assign(g.components.size(), 0.0);

  std::vector<double> comp_max2(g.components.size(), 0.0);
  double whole_max2 = 0.0;
  for (int i = 0; i < s.n; ++i) {
    for (int j = i + 1; j < s.n; ++j) {
      double d2 = squared_distance(s, i, j);
      whole_max2 = std::max(whole_max2, d2);
      if (g.component_of[i] == g.component_of[j]) {
        auto c = static_cast<std::size_t>(g.component_of[i]);
        comp_max2[c] = std::max(comp_max2[c], d2);
      }
    }
  }
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    r.component_diameter[c] = std::sqrt(comp_max2[c]);
    if (!(comp_max2[c] <= delta2)) {
      r.component_trivial[c] = 0;
      r.all_components_trivial = false;
    }
  }
  r.whole_diameter = std::sqrt(whole_max2);
  r.whole_set_trivial = whole_max2 <= delta2;
  return r;
}

double max_intra_component_dist2(const ProfileGraph& g, const OpinionState& s) {
  double max2 = 0.0;
  for (int i = 0; i < s.n; ++i)
    for (int j = i + 1; j < s.n; ++j)
      if (g.component_of[i] == g.component_of[j])
        max2 = std::max(max2, squared_distance(s, i, j));
  return max2;
}

std::vector<HullSummary> hull_summaries(const ProfileGraph& g, const OpinionState& s) {
  std::vector<HullSummary> out(g.components.size());
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    auto& h = out[c];
    h.component = static_cast<int>(c);
    h.members = g.components[c];
    h.points.reserve(h.members.size() * static_cast<std::size_t>(s.d));
    double max2 = 0.0;
    for (std::size_t a = 0; a < h.members.size(); ++a) {
      auto p = s.opinion(h.members[a]);
      h.points.insert(h.points.end(), p.begin(), p.end());
      for (std::size_t b = a + 1; b < h.members.size(); ++b)
        max2 = std::max(max2, squared_distance(s, h.members[a], h.members[b]));
    }
    h.diameter = std::sqrt(max2);
  }
  return out;
}

namespace {

double interval_gap(std::span<const double> a, std::span<const double> b) {
  double amin = a[0], amax = a[0];
  for (double v : a) {
    amin = std::min(amin, v);
    amax = std::max(amax, v);
  }
  double bmin = b[0], bmax = b[0];
  for (double v : b) {
    bmin = std::min(bmin, v);
    bmax = std::max(bmax, v);
  }
  return std::max({bmin - amax, amin - bmax, 0.0});
}

// Support point of the Minkowski difference conv(A) - conv(B) minimizing
// <dir, .>: the farthest A-point against dir minus the farthest B-point
// along dir.
void support_point(std::span<const double> a, std::span<const double> b, int d,
                   const std::vector<double>& dir, std::vector<double>& out) {
  const std::size_t na = a.size() / d, nb = b.size() / d;
  std::size_t best_a = 0, best_b = 0;
  double best_dot_a = 0.0, best_dot_b = 0.0;
  for (std::size_t p = 0; p < na; ++p) {
    double dot = 0.0;
    for (int c = 0; c < d; ++c) dot += dir[c] * a[p * d + c];
    if (p == 0 || dot < best_dot_a) {
      best_dot_a = dot;
      best_a = p;
    }
  }
  for (std::size_t p = 0; p < nb; ++p) {
    double dot = 0.0;
    for (int c = 0; c < d; ++c) dot += dir[c] * b[p * d + c];
    if (p == 0 || dot > best_dot_b) {
      best_dot_b = dot;
      best_b = p;
    }
  }
  for (int c = 0; c < d; ++c) out[c] = a[best_a * d + c] - b[best_b * d + c];
}

}  // namespace

double hull_distance(std::span<const double> a, std::span<const double> b, int d) {
  if (d < 1) throw std::invalid_argument("hull_distance: d must be >= 1");
  if (a.empty() || b.empty() || a.size() % d != 0 || b.size() % d != 0)
    throw std::invalid_argument("hull_distance: point sets must be nonempty multiples of d");
  if (d == 1) return interval_gap(a, b);

  constexpr double kTol = 1e-9;
  constexpr int kMaxIter = 200000;

  // z: current point of conv(A) - conv(B); distance = min over the
  // difference hull of ||z||.
  std::vector<double> z(d), s(d);
  for (int c = 0; c < d; ++c) z[c] = a[c] - b[c];

  for (int iter = 0; iter < kMaxIter; ++iter) {
    double zz = 0.0;
    for (int c = 0; c < d; ++c) zz += z[c] * z[c];
    const double ub = std::sqrt(zz);
    if (ub <= kTol) return ub;  // hulls overlap (or touch) to tolerance

    support_point(a, b, d, z, s);
    double zs = 0.0;
    for (int c = 0; c < d; ++c) zs += z[c] * s[c];
    // ||z*|| >= <z, s>/||z|| for the optimum z*; stop when bounds meet.
    const double lb = zs / ub;
    if (ub - std::max(lb, 0.0) <= kTol) return ub;

    // Exact line search on the segment [z, s] for the quadratic ||.||^2.
    double seg2 = 0.0;
    for (int c = 0; c < d; ++c) {
      double diff = s[c] - z[c];
      seg2 += diff * diff;
    }
    if (seg2 == 0.0) return ub;
    double lambda = (zz - zs) / seg2;
    lambda = std::clamp(lambda, 0.0, 1.0);
    for (int c = 0; c < d; ++c) z[c] += lambda * (s[c] - z[c]);
  }
  double zz = 0.0;
  for (int c = 0; c < d; ++c) zz += z[c] * z[c];
  return std::sqrt(zz);  // iteration cap: upper bound, still a hull distance witness
}

EquilibriumReport check_delta_equilibrium(const OpinionState& s, double delta) {
  if (!(delta > 0.0) || !(delta <= s.epsilon))
    throw std::invalid_argument("check_delta_equilibrium: need 0 < delta <= epsilon");
  ProfileGraph g = build_profile(s);
  auto hulls = hull_summaries(g, s);
  auto triv = is_delta_trivial(g, s, delta);

  EquilibriumReport r;
  r.component_of = g.component_of;
  for (std::size_t c = 0; c < hulls.size(); ++c)
    if (!triv.component_trivial[c]) r.cohesion_failures.push_back(static_cast<int>(c));

  const double sep_threshold = s.d == 1 ? s.epsilon : s.epsilon + 1e-9;
  for (std::size_t c1 = 0; c1 < hulls.size(); ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < hulls.size(); ++c2) {
      double dist = hull_distance(hulls[c1].points, hulls[c2].points, s.d);
      if (!(dist > sep_threshold))
        r.separation_failures.emplace_back(static_cast<int>(c1), static_cast<int>(c2));
    }
  }
  r.is_equilibrium = r.cohesion_failures.empty() && r.separation_failures.empty();
  return r;
}

}  // namespace mhk
