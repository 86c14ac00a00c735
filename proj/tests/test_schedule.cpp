#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "mhk/errors.hpp"
#include "mhk/rng.hpp"
#include "mhk/schedule.hpp"

using mhk::ScheduleKind;
using mhk::ScheduleSpec;

namespace {

ScheduleSpec two_set_partition() {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::StochasticSupport;
  spec.support = {{{0, 1}, 0.5}, {{2, 3, 4}, 0.5}};
  spec.partition_indices = {0, 1};
  spec.open_alpha = {0.0, 0.5};
  return spec;
}

}  // namespace

TEST_CASE("synchronous schedule opens everyone with zero stubbornness") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::Synchronous;
  const auto a = mhk::next_assignment(spec, 0, 3, mhk::RngStream(1));
  CHECK(a.alphas == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(a.open_set == std::vector<int>{0, 1, 2});
}

TEST_CASE("asynchronous schedule opens exactly one agent with zero stubbornness") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::Asynchronous;
  for (long t = 0; t < 200; ++t) {
    const auto a = mhk::next_assignment(spec, t, 3, mhk::RngStream(7));
    REQUIRE(a.open_set.size() == 1);
    const int open = a.open_set[0];
    for (int i = 0; i < 3; ++i) CHECK(a.alphas[static_cast<std::size_t>(i)] == (i == open ? 0.0 : 1.0));
  }
}

TEST_CASE("scripted schedule replays its rows and reports exhaustion") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::Scripted;
  spec.scripted = {{0.1, 0.2}, {1.0, 0.0}};
  const auto a0 = mhk::next_assignment(spec, 0, 2, mhk::RngStream(1));
  CHECK(a0.alphas == std::vector<double>{0.1, 0.2});
  const auto a1 = mhk::next_assignment(spec, 1, 2, mhk::RngStream(1));
  CHECK(a1.open_set == std::vector<int>{1});
  CHECK_THROWS_WITH_AS((void)mhk::next_assignment(spec, 2, 2, mhk::RngStream(1)),
                       doctest::Contains("exhausted"), mhk::ConfigError);
}

TEST_CASE("stochastic support: every draw is a support element with the right alphas") {
  const ScheduleSpec spec = two_set_partition();
  spec.validate(5);
  const mhk::RngStream stream(99);
  for (long t = 0; t < 500; ++t) {
    const auto a = mhk::next_assignment(spec, t, 5, stream);
    const bool first = a.open_set == std::vector<int>{0, 1};
    const bool second = a.open_set == std::vector<int>{2, 3, 4};
    CHECK((first || second));
    for (int i : a.open_set) {
      CHECK(a.alphas[static_cast<std::size_t>(i)] >= 0.0);
      CHECK(a.alphas[static_cast<std::size_t>(i)] < 0.5);
    }
    for (int i = 0; i < 5; ++i)
      if (std::find(a.open_set.begin(), a.open_set.end(), i) == a.open_set.end())
        CHECK(a.alphas[static_cast<std::size_t>(i)] == 1.0);
  }
}

TEST_CASE("stochastic support: empirical element frequencies sit in the four-sigma band") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::StochasticSupport;
  spec.support = {{{0}, 0.2}, {{1}, 0.3}, {{0, 1}, 0.5}};
  spec.partition_indices = {0, 1};
  spec.open_alpha = {0.0, 0.0};
  spec.validate(2);

  const long kDraws = 100000;
  const auto cumulative = mhk::support_cumulative(spec);
  std::vector<double> alphas(2);  // the draw core expects a caller-sized buffer
  std::vector<long> hits(spec.support.size(), 0);
  const mhk::RngStream stream(20260816);
  for (long t = 0; t < kDraws; ++t)
    ++hits[static_cast<std::size_t>(mhk::stochastic_alphas_into(spec, t, stream, cumulative, alphas))];
  for (std::size_t k = 0; k < spec.support.size(); ++k) {
    const double p = spec.support[k].probability;
    const double freq = static_cast<double>(hits[k]) / static_cast<double>(kDraws);
    CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(kDraws)));
  }
}

TEST_CASE("draw-core and next_assignment produce bitwise identical assignments") {
  const ScheduleSpec spec = two_set_partition();
  const auto cumulative = mhk::support_cumulative(spec);
  const mhk::RngStream stream(424242);
  std::vector<double> alphas(5);
  for (long t = 0; t < 100; ++t) {
    mhk::stochastic_alphas_into(spec, t, stream, cumulative, alphas);
    const auto a = mhk::next_assignment(spec, t, 5, stream);
    REQUIRE(a.alphas.size() == alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i)
      CHECK(std::bit_cast<std::uint64_t>(a.alphas[i]) == std::bit_cast<std::uint64_t>(alphas[i]));
  }
}

TEST_CASE("asynchronous lowering: singleton support, uniform probability, constant zero alpha") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::Asynchronous;
  const ScheduleSpec low = mhk::as_stochastic_support(spec, 4);
  REQUIRE(low.kind == ScheduleKind::StochasticSupport);
  REQUIRE(low.support.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(low.support[static_cast<std::size_t>(i)].members == std::vector<int>{i});
    CHECK(low.support[static_cast<std::size_t>(i)].probability == 1.0 / 4.0);
  }
  CHECK(low.partition_indices == std::vector<int>{0, 1, 2, 3});
  CHECK(low.open_alpha.is_constant());
  CHECK(low.open_alpha.lo == 0.0);
  low.validate(4);
}

TEST_CASE("minimum partition probability") {
  ScheduleSpec uniform;
  uniform.kind = ScheduleKind::StochasticSupport;
  uniform.support = {{{0}, 1.0 / 3.0}, {{1}, 1.0 / 3.0}, {{2}, 1.0 / 3.0}};
  uniform.partition_indices = {0, 1, 2};
  CHECK(mhk::min_partition_probability(uniform) == 1.0 / 3.0);

  ScheduleSpec skewed;
  skewed.kind = ScheduleKind::StochasticSupport;
  skewed.support = {{{0, 1}, 0.5}, {{2}, 0.25}, {{0, 2}, 0.25}};
  skewed.partition_indices = {0, 1};
  CHECK(mhk::min_partition_probability(skewed) == 0.25);

  ScheduleSpec async;
  async.kind = ScheduleKind::Asynchronous;
  CHECK(mhk::min_partition_probability(mhk::as_stochastic_support(async, 5)) == 1.0 / 5.0);

  CHECK_THROWS_AS((void)mhk::min_partition_probability(async), std::invalid_argument);
}

TEST_CASE("gamma bound per policy") {
  ScheduleSpec spec = two_set_partition();
  spec.open_alpha = {0.4, 0.4};
  CHECK(mhk::gamma_bound(spec) == 0.4);
  spec.open_alpha = {0.1, 0.6};
  CHECK(mhk::gamma_bound(spec) == 0.6);

  ScheduleSpec async;
  async.kind = ScheduleKind::Asynchronous;
  CHECK(mhk::gamma_bound(async) == 0.0);
  ScheduleSpec sync;
  sync.kind = ScheduleKind::Synchronous;
  CHECK(mhk::gamma_bound(sync) == 0.0);

  ScheduleSpec scripted;
  scripted.kind = ScheduleKind::Scripted;
  scripted.scripted = {{0.3, 1.0}, {0.8, 0.2}};
  CHECK(mhk::gamma_bound(scripted) == 0.8);
}

TEST_CASE("generated assignments respect the open-set contract and the gamma bound") {
  const ScheduleSpec spec = two_set_partition();
  const double gamma = mhk::gamma_bound(spec).value();
  const mhk::RngStream stream(5150);
  for (long t = 0; t < 300; ++t) {
    const auto a = mhk::next_assignment(spec, t, 5, stream);
    for (int i = 0; i < 5; ++i) {
      const bool open =
          std::find(a.open_set.begin(), a.open_set.end(), i) != a.open_set.end();
      CHECK(open == (a.alphas[static_cast<std::size_t>(i)] < 1.0));
      if (open) CHECK(a.alphas[static_cast<std::size_t>(i)] <= gamma);
    }
  }
}

TEST_CASE("validation: overlapping partition sets are rejected") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::StochasticSupport;
  spec.support = {{{0, 1}, 0.5}, {{1, 2}, 0.5}};
  spec.partition_indices = {0, 1};
  CHECK_THROWS_WITH_AS(spec.validate(3), doctest::Contains("partition not disjoint"),
                       mhk::ConfigError);
}

TEST_CASE("validation: a partition that misses an agent is rejected") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::StochasticSupport;
  spec.support = {{{0}, 0.5}, {{1}, 0.5}};
  spec.partition_indices = {0, 1};
  CHECK_THROWS_WITH_AS(spec.validate(3), doctest::Contains("does not cover agent 3"),
                       mhk::ConfigError);
}

TEST_CASE("validation: probabilities must sum to one") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::StochasticSupport;
  spec.support = {{{0}, 0.5}, {{1}, 0.4}};
  spec.partition_indices = {0, 1};
  CHECK_THROWS_WITH_AS(spec.validate(2), doctest::Contains("probabilities sum"), mhk::ConfigError);
}

TEST_CASE("validation: member indices, ordering, and alpha policy") {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::StochasticSupport;
  spec.support = {{{0, 5}, 1.0}};
  spec.partition_indices = {0};
  CHECK_THROWS_AS(spec.validate(3), mhk::ConfigError);  // member out of range

  spec.support = {{{1, 0}, 1.0}};
  CHECK_THROWS_WITH_AS(spec.validate(2), doctest::Contains("ascending"), mhk::ConfigError);

  spec.support = {{{0, 1}, 1.0}};
  spec.open_alpha = {0.5, 1.0};  // hi must stay below 1
  CHECK_THROWS_WITH_AS(spec.validate(2), doctest::Contains("open_alpha"), mhk::ConfigError);
}

TEST_CASE("determinism: the same seed replays the same assignment sequence") {
  const ScheduleSpec spec = two_set_partition();
  for (long t : {0L, 3L, 17L, 400L}) {
    const auto a = mhk::next_assignment(spec, t, 5, mhk::RngStream(8888));
    const auto b = mhk::next_assignment(spec, t, 5, mhk::RngStream(8888));
    CHECK(a.alphas == b.alphas);
    CHECK(a.open_set == b.open_set);
  }
}

TEST_CASE("select_by_cumulative picks the first interval containing u") {
  const std::vector<double> cumulative = {0.2, 0.5, 1.0};
  CHECK(mhk::select_by_cumulative(0.0, cumulative) == 0);
  CHECK(mhk::select_by_cumulative(0.19, cumulative) == 0);
  CHECK(mhk::select_by_cumulative(0.2, cumulative) == 1);
  CHECK(mhk::select_by_cumulative(0.999, cumulative) == 2);
}
