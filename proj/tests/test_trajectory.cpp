#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mhk/errors.hpp"
#include "mhk/trajectory.hpp"

namespace {

mhk::ScenarioConfig merge_scenario(long horizon) {
  mhk::ScenarioConfig sc;
  sc.n = 2;
  sc.d = 1;
  sc.epsilon = 0.5;
  sc.delta = 0.1;
  sc.horizon = horizon;
  sc.master_seed = 7;
  sc.initial = std::vector<double>{0.0, 0.5};
  sc.schedule.kind = mhk::ScheduleKind::Synchronous;
  return sc;
}

}  // namespace

TEST_CASE("run_trajectory: a two-step run stores three records with transition data") {
  const auto traj = mhk::run_trajectory(merge_scenario(2));
  REQUIRE(traj.steps.size() == 3);
  CHECK(traj.horizon() == 2);
  CHECK(traj.n == 2);
  CHECK(traj.schedule_kind == mhk::ScheduleKind::Synchronous);

  const auto& first = traj.steps[0];
  CHECK(first.t == 0);
  CHECK(first.alphas == std::vector<double>{0.0, 0.0});
  CHECK(first.open_set == std::vector<int>{0, 1});
  CHECK(first.z == 0.5);
  REQUIRE(first.decrement.has_value());
  CHECK(*first.decrement == 0.5);
  REQUIRE(first.nl8_bound.has_value());
  CHECK(first.merges.empty());
  CHECK(first.edge_count == 1);
  CHECK(first.component_count == 1);

  const auto& mid = traj.steps[1];
  CHECK(mid.coords == std::vector<double>{0.25, 0.25});
  CHECK(mid.merges == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(mid.z == 0.0);
  REQUIRE(mid.decrement.has_value());
  CHECK(*mid.decrement == 0.0);

  const auto& last = traj.steps[2];
  CHECK(last.t == 2);
  CHECK(last.alphas.empty());
  CHECK(last.open_set.empty());
  CHECK_FALSE(last.decrement.has_value());
  CHECK_FALSE(last.nl8_bound.has_value());

  REQUIRE(traj.steady_from.has_value());
  CHECK(*traj.steady_from == 1);
}

TEST_CASE("run_trajectory: early stop on a certified fixed point") {
  mhk::RunOptions opt;
  opt.stop_on_termination = true;
  const auto traj = mhk::run_trajectory(merge_scenario(100), opt);
  REQUIRE(traj.steps.size() == 2);
  CHECK(traj.horizon() == 1);
  CHECK(traj.steady_from == 1);
  CHECK(traj.steps.back().alphas.empty());
  // The record before the stop still carries its transition diagnostics.
  CHECK(traj.steps[0].decrement.has_value());
}

TEST_CASE("run_trajectory: horizon override replaces the scenario horizon") {
  mhk::RunOptions opt;
  opt.horizon_override = 5;
  const auto traj = mhk::run_trajectory(merge_scenario(2), opt);
  CHECK(traj.steps.size() == 6);
  CHECK(traj.horizon() == 5);

  opt.horizon_override = 0;
  CHECK_THROWS_AS((void)mhk::run_trajectory(merge_scenario(2), opt), mhk::ConfigError);

  auto sc = merge_scenario(2);
  sc.schedule.kind = mhk::ScheduleKind::Scripted;
  sc.schedule.scripted = {{0.0, 0.0}, {0.0, 0.0}};
  opt.horizon_override = 4;  // script has only 2 rows
  CHECK_THROWS_AS((void)mhk::run_trajectory(sc, opt), mhk::ConfigError);
}

TEST_CASE("run_trajectory: consensus start is steady from step zero") {
  auto sc = merge_scenario(3);
  sc.initial = std::vector<double>{0.3, 0.3};
  const auto traj = mhk::run_trajectory(sc);
  REQUIRE(traj.steady_from.has_value());
  CHECK(*traj.steady_from == 0);
  for (const auto& rec : traj.steps) CHECK(rec.coords == std::vector<double>{0.3, 0.3});
}

TEST_CASE("run_trajectory: generated initials are reproducible per run index") {
  mhk::ScenarioConfig sc;
  sc.n = 3;
  sc.d = 2;
  sc.epsilon = 0.4;
  sc.delta = 0.05;
  sc.horizon = 4;
  sc.master_seed = 99;
  sc.initial = mhk::UniformBoxSpec{0.0, 1.0, 42};
  sc.schedule.kind = mhk::ScheduleKind::Asynchronous;

  const auto a = mhk::run_trajectory(sc, {.run_index = 0});
  const auto b = mhk::run_trajectory(sc, {.run_index = 0});
  const auto c = mhk::run_trajectory(sc, {.run_index = 1});
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i)
    CHECK(a.steps[i].coords == b.steps[i].coords);
  CHECK(a.steps[0].coords != c.steps[0].coords);
}

TEST_CASE("trajectory accessors: state and assignment reconstruction") {
  const auto traj = mhk::run_trajectory(merge_scenario(2));
  const auto s1 = traj.state_at(1);
  CHECK(s1.t == 1);
  CHECK(s1.n == 2);
  CHECK(s1.epsilon == 0.5);
  CHECK(s1.coords == std::vector<double>{0.25, 0.25});

  const auto a0 = traj.assignment_at(0);
  CHECK(a0.alphas == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS((void)traj.assignment_at(2), std::out_of_range);  // final record
  CHECK_THROWS_AS((void)traj.state_at(17), std::out_of_range);
}

TEST_CASE("is_steady_state: consensus and isolation certify, motion does not") {
  // Certification is bitwise, so the consensus point must have an exactly
  // representable three-way mean (summing three copies of 0.2 does not).
  mhk::OpinionState consensus(0, 3, 1, 0.5, {0.25, 0.25, 0.25});
  CHECK(mhk::is_steady_state(consensus, mhk::compute_neighborhoods(consensus)));

  mhk::OpinionState apart(0, 2, 1, 0.5, {0.0, 10.0});
  CHECK(mhk::is_steady_state(apart, mhk::compute_neighborhoods(apart)));

  mhk::OpinionState moving(0, 2, 1, 0.5, {0.0, 0.5});
  CHECK_FALSE(mhk::is_steady_state(moving, mhk::compute_neighborhoods(moving)));
}

TEST_CASE("audit: an untouched run is clean") {
  const auto traj = mhk::run_trajectory(merge_scenario(3));
  const auto audit = mhk::audit_trajectory(traj);
  CHECK(audit.clean());
  CHECK(audit.transitions == 3);
}

TEST_CASE("audit: tampering is pinned to the matching counter") {
  const auto base = mhk::run_trajectory(merge_scenario(2));

  SUBCASE("replayed transition disagrees after a coordinate flip") {
    auto traj = base;
    traj.steps[1].coords[0] += 1e-9;
    const auto audit = mhk::audit_trajectory(traj);
    CHECK(audit.replay_mismatches >= 1);
    CHECK_FALSE(audit.clean());
  }
  SUBCASE("stored energy no longer matches the state") {
    auto traj = base;
    traj.steps[0].z += 1e-6;
    CHECK(mhk::audit_trajectory(traj).z_mismatches >= 1);
  }
  SUBCASE("stored decrement disagrees with the energy difference") {
    auto traj = base;
    traj.steps[0].decrement = *traj.steps[0].decrement + 1.0;
    CHECK(mhk::audit_trajectory(traj).decrement_mismatches >= 1);
  }
  SUBCASE("understated decrement trips the descent bound") {
    auto traj = base;
    traj.steps[0].decrement = *traj.steps[0].nl8_bound - 1.0;
    const auto audit = mhk::audit_trajectory(traj);
    CHECK(audit.decrement_bound_failures >= 1);
  }
  SUBCASE("stored lower bound disagrees with the recomputed one") {
    auto traj = base;
    traj.steps[0].nl8_bound = *traj.steps[0].nl8_bound + 0.25;
    CHECK(mhk::audit_trajectory(traj).nl8_mismatches >= 1);
  }
  SUBCASE("invented merge pairs are rejected") {
    auto traj = base;
    traj.steps[2].merges = {{0, 1}};
    CHECK(mhk::audit_trajectory(traj).merge_mismatches >= 1);
  }
  SUBCASE("merges on the first record are rejected") {
    auto traj = base;
    traj.steps[0].merges = {{0, 1}};
    CHECK(mhk::audit_trajectory(traj).merge_mismatches >= 1);
  }
  SUBCASE("stored component count disagrees with the graph") {
    auto traj = base;
    traj.steps[1].component_count += 1;
    CHECK(mhk::audit_trajectory(traj).profile_mismatches >= 1);
  }
  SUBCASE("transition data on the final record is rejected") {
    auto traj = base;
    traj.steps[2].alphas = {0.0, 0.0};
    CHECK(mhk::audit_trajectory(traj).replay_mismatches >= 1);
  }
}

TEST_CASE("audit: outward tampering trips the box and descent checks") {
  mhk::ScenarioConfig sc;
  sc.n = 2;
  sc.d = 1;
  sc.epsilon = 1.0;
  sc.delta = 0.1;
  sc.horizon = 1;
  sc.master_seed = 3;
  sc.initial = std::vector<double>{0.0, 0.25};
  sc.schedule.kind = mhk::ScheduleKind::Synchronous;
  auto traj = mhk::run_trajectory(sc);
  REQUIRE(traj.steps.size() == 2);
  traj.steps[1].coords = {0.0, 0.9};  // outside the initial bounding box
  const auto audit = mhk::audit_trajectory(traj);
  CHECK(audit.box_escapes >= 1);
  CHECK(audit.energy_increases >= 1);
  CHECK(audit.replay_mismatches >= 1);
}
