#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "doctest.h"
#include "mhk/dynamics.hpp"
#include "mhk/profile.hpp"
#include "mhk/rng.hpp"

using mhk::OpinionState;

TEST_CASE("profile: two agents at distance epsilon form one edge, one component") {
  const double eps = 0.7;
  OpinionState s(0, 2, 1, eps, {0.0, eps});
  const auto g = mhk::build_profile(s);
  CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(g.component_count() == 1);
}

TEST_CASE("profile: two agents at distance 2*epsilon are isolated") {
  const double eps = 0.7;
  OpinionState s(0, 2, 1, eps, {0.0, 2.0 * eps});
  const auto g = mhk::build_profile(s);
  CHECK(g.edges.empty());
  CHECK(g.component_count() == 2);
  CHECK(g.component_of == std::vector<int>{0, 1});
}

TEST_CASE("profile: chain plus outlier splits into two components") {
  OpinionState s(0, 4, 1, 1.0, {0.0, 0.9, 1.8, 4.0});
  const auto g = mhk::build_profile(s);
  CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
  REQUIRE(g.component_count() == 2);
  CHECK(g.components[0] == std::vector<int>{0, 1, 2});
  CHECK(g.components[1] == std::vector<int>{3});
}

TEST_CASE("profile edges coincide with step neighborhoods on random states") {
  auto dr = mhk::RngStream(601).at(0);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 2 + static_cast<int>(dr.next_u64() % 7);
    const int d = 1 + static_cast<int>(dr.next_u64() % 3);
    std::vector<double> coords(static_cast<std::size_t>(n) * d);
    for (double& v : coords) v = dr.next_unit() * 2.0;
    OpinionState s(0, n, d, 0.2 + dr.next_unit(), std::move(coords));
    const auto g = mhk::build_profile(s);
    const auto nbhd = mhk::compute_neighborhoods(s);
    long edge_count = 0;
    for (int i = 0; i < n; ++i)
      for (int j : nbhd[static_cast<std::size_t>(i)].members)
        if (j > i) {
          ++edge_count;
          CHECK(std::find(g.edges.begin(), g.edges.end(), std::make_pair(i, j)) != g.edges.end());
        }
    CHECK(edge_count == static_cast<long>(g.edges.size()));
  }
}

TEST_CASE("triviality: singletons pass for every threshold") {
  OpinionState s(0, 2, 1, 0.1, {0.0, 5.0});
  const auto g = mhk::build_profile(s);
  const auto rep = mhk::is_delta_trivial(g, s, 1e-12);
  CHECK(rep.all_components_trivial);
  CHECK(mhk::max_intra_component_dist2(g, s) == 0.0);
}

TEST_CASE("triviality: chain of diameter 1.8 against thresholds 1 and 1.8") {
  OpinionState s(0, 3, 1, 1.0, {0.0, 0.9, 1.8});
  const auto g = mhk::build_profile(s);
  REQUIRE(g.component_count() == 1);
  CHECK_FALSE(mhk::is_delta_trivial(g, s, 1.0).all_components_trivial);
  CHECK(mhk::is_delta_trivial(g, s, 1.8).all_components_trivial);  // boundary inclusive
  CHECK(mhk::max_intra_component_dist2(g, s) == doctest::Approx(1.8 * 1.8).epsilon(1e-12));
}

TEST_CASE("triviality report separates per-component and whole-set views") {
  // Two tight clusters far apart: components trivial, whole set not.
  OpinionState s(0, 4, 1, 0.5, {0.0, 0.1, 3.0, 3.1});
  const auto g = mhk::build_profile(s);
  REQUIRE(g.component_count() == 2);
  const auto rep = mhk::is_delta_trivial(g, s, 0.2);
  CHECK(rep.all_components_trivial);
  CHECK_FALSE(rep.whole_set_trivial);
  CHECK(rep.whole_diameter == doctest::Approx(3.1).epsilon(1e-12));
}

TEST_CASE("hull summaries expose component diameters") {
  OpinionState s(0, 4, 1, 1.0, {0.0, 0.9, 1.8, 4.0});
  const auto g = mhk::build_profile(s);
  const auto hulls = mhk::hull_summaries(g, s);
  REQUIRE(hulls.size() == 2);
  CHECK(hulls[0].members == std::vector<int>{0, 1, 2});
  CHECK(hulls[0].diameter == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(hulls[1].diameter == 0.0);
}

TEST_CASE("hull distance: interval gap in one dimension is exact") {
  const std::vector<double> a = {0.0, 0.2};
  const std::vector<double> b = {0.5, 0.9};
  CHECK(mhk::hull_distance(a, b, 1) == 0.5 - 0.2);
  CHECK(mhk::hull_distance(b, a, 1) == 0.5 - 0.2);
}

TEST_CASE("hull distance: overlapping hulls are at distance zero") {
  const std::vector<double> a = {0.0, 1.0};
  const std::vector<double> b = {0.5, 2.0};
  CHECK(mhk::hull_distance(a, b, 1) == 0.0);
  const std::vector<double> c = {0.0, 0.0, 2.0, 0.0, 0.0, 2.0};
  const std::vector<double> e = {0.5, 0.5, 3.0, 3.0};
  CHECK(mhk::hull_distance(c, e, 2) <= 1e-9);
}

TEST_CASE("hull distance: parallel segments in the plane") {
  const std::vector<double> a = {0.0, 0.0, 1.0, 0.0};
  const std::vector<double> b = {0.0, 2.0, 1.0, 2.0};
  CHECK(mhk::hull_distance(a, b, 2) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("hull distance: triangle to outside point, against a dense-sampling oracle") {
  const std::vector<double> tri = {0.0, 0.0, 1.0, 0.0, 0.0, 1.0};
  const std::vector<double> pt = {1.0, 1.0};
  const double got = mhk::hull_distance(tri, pt, 2);

  // Dense barycentric sampling of the triangle.
  double best = 1e300;
  const int kGrid = 400;
  for (int u = 0; u <= kGrid; ++u)
    for (int v = 0; v <= kGrid - u; ++v) {
      const double l1 = static_cast<double>(u) / kGrid;
      const double l2 = static_cast<double>(v) / kGrid;
      const double px = l1 * 1.0;  // vertex (1,0)
      const double py = l2 * 1.0;  // vertex (0,1)
      const double dx = px - 1.0;
      const double dy = py - 1.0;
      best = std::min(best, std::sqrt(dx * dx + dy * dy));
    }
  CHECK(got == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(std::abs(got - best) <= 1e-2);  // grid resolution bound
}

TEST_CASE("hull distance between adjacent one-dimensional components equals the gap") {
  // The 0.2 to 0.5 link sits exactly on the radius and is inclusive, so the
  // components are {0, 0.2, 0.5} and {0.9} and the gap runs from 0.5 to 0.9.
  OpinionState s(0, 4, 1, 0.3, {0.0, 0.2, 0.5, 0.9});
  const auto g = mhk::build_profile(s);
  REQUIRE(g.component_count() == 2);
  const auto hulls = mhk::hull_summaries(g, s);
  CHECK(mhk::hull_distance(hulls[0].points, hulls[1].points, 1) == 0.4);
  CHECK(mhk::hull_distance(hulls[1].points, hulls[0].points, 1) == 0.4);
}

TEST_CASE("hull distance rejects malformed input") {
  const std::vector<double> a = {0.0};
  const std::vector<double> empty;
  CHECK_THROWS_AS((void)mhk::hull_distance(a, empty, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)mhk::hull_distance(a, a, 0), std::invalid_argument);
  const std::vector<double> ragged = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS((void)mhk::hull_distance(ragged, ragged, 2), std::invalid_argument);
}

TEST_CASE("equilibrium: far-apart singletons qualify") {
  OpinionState s(0, 2, 1, 0.5, {0.0, 1.5});
  const auto rep = mhk::check_delta_equilibrium(s, 0.1);
  CHECK(rep.is_equilibrium);
  CHECK(rep.separation_failures.empty());
  CHECK(rep.cohesion_failures.empty());
}

TEST_CASE("equilibrium: a component wider than delta fails cohesion") {
  // Three collinear opinions chained within epsilon, spanning 2 * delta.
  const double delta = 0.3;
  OpinionState s(0, 3, 1, 0.5, {0.0, delta, 2.0 * delta});
  const auto rep = mhk::check_delta_equilibrium(s, delta);
  CHECK_FALSE(rep.is_equilibrium);
  CHECK(rep.cohesion_failures == std::vector<int>{0});
}

TEST_CASE("equilibrium: consensus qualifies for every admissible delta") {
  OpinionState s(0, 3, 2, 0.5, {0.4, 0.4, 0.4, 0.4, 0.4, 0.4});
  for (double delta : {1e-9, 0.1, 0.5}) {
    const auto rep = mhk::check_delta_equilibrium(s, delta);
    CHECK(rep.is_equilibrium);
  }
}

TEST_CASE("equilibrium: separation just past epsilon passes in one dimension") {
  OpinionState s(0, 4, 1, 0.3, {0.0, 0.05, 0.36, 0.41});
  // Components [0, 0.05] and [0.36, 0.41]; hull gap 0.31 > epsilon = 0.3.
  const auto rep = mhk::check_delta_equilibrium(s, 0.1);
  CHECK(rep.is_equilibrium);
}

TEST_CASE("equilibrium: hulls within epsilon fail separation in the plane") {
  // A segment and a point that is farther than epsilon from both endpoints
  // but closer than epsilon to the segment's interior.
  OpinionState s(0, 3, 2, 1.0, {0.0, 0.0, 0.0, 0.25, 0.999, 0.125});
  const auto g = mhk::build_profile(s);
  REQUIRE(g.component_count() == 2);
  const auto rep = mhk::check_delta_equilibrium(s, 0.3);
  CHECK_FALSE(rep.is_equilibrium);
  CHECK(rep.separation_failures == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(rep.cohesion_failures.empty());
}

TEST_CASE("equilibrium rejects an out-of-range delta") {
  OpinionState s(0, 2, 1, 0.5, {0.0, 1.5});
  CHECK_THROWS_AS((void)mhk::check_delta_equilibrium(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)mhk::check_delta_equilibrium(s, 0.6), std::invalid_argument);
}
