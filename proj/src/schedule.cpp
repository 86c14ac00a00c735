#include "mhk/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "mhk/errors.hpp"

namespace mhk {

std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Synchronous: return "synchronous";
    case ScheduleKind::Asynchronous: return "asynchronous";
    case ScheduleKind::Scripted: return "scripted";
    case ScheduleKind::StochasticSupport: return "stochastic_support";
  }
  return "?";
}

namespace {

void validate_support(const ScheduleSpec& spec, int n) {
  if (spec.support.empty()) throw ConfigError("schedule.support: must not be empty");
  double total = 0.0;
  for (std::size_t k = 0; k < spec.support.size(); ++k) {
    const auto& el = spec.support[k];
    const std::string where = "schedule.support[" + std::to_string(k) + "]";
    if (!(el.probability > 0.0) || !std::isfinite(el.probability))
      throw ConfigError(where + ".probability: must be finite and > 0");
    total += el.probability;
    int prev = -1;
    for (int m : el.members) {
      if (m < 0 || m >= n)
        throw ConfigError(where + ".members: agent index " + std::to_string(m) +
                          " out of range for n = " + std::to_string(n));
      if (m <= prev) throw ConfigError(where + ".members: must be strictly ascending");
      prev = m;
    }
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("schedule.support: probabilities sum to " + std::to_string(total) +
                      ", expected 1 within 1e-12");

  if (spec.partition_indices.empty())
    throw ConfigError("schedule.partition_indices: must designate a partition");
  std::vector<char> seen_index(spec.support.size(), 0);
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  for (int idx : spec.partition_indices) {
    if (idx < 0 || idx >= static_cast<int>(spec.support.size()))
      throw ConfigError("schedule.partition_indices: index " + std::to_string(idx) +
                        " out of range");
    if (seen_index[idx])
      throw ConfigError("schedule.partition_indices: index " + std::to_string(idx) + " repeated");
    seen_index[idx] = 1;
    if (spec.support[idx].members.empty())
      throw ConfigError("schedule.support[" + std::to_string(idx) +
                        "]: partition element must be nonempty");
    for (int m : spec.support[idx].members) {
      if (covered[m]) throw ConfigError("schedule.partition_indices: partition not disjoint");
      covered[m] = 1;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!covered[i])
      throw ConfigError("schedule.partition_indices: partition does not cover agent " +
                        std::to_string(i + 1));

  const auto& p = spec.open_alpha;
  if (!(p.lo >= 0.0) || !(p.hi >= p.lo) || !(p.hi < 1.0) || !std::isfinite(p.lo) ||
      !std::isfinite(p.hi))
    throw ConfigError("schedule.open_alpha: need 0 <= lo <= hi < 1");
}

}  // namespace

void ScheduleSpec::validate(int n) const {
  if (n < 1) throw ConfigError("schedule: n must be >= 1");
  switch (kind) {
    case ScheduleKind::Synchronous:
    case ScheduleKind::Asynchronous:
      return;
    case ScheduleKind::Scripted: {
      if (scripted.empty()) throw ConfigError("schedule.scripted: must contain at least one row");
      for (std::size_t t = 0; t < scripted.size(); ++t) {
        if (scripted[t].size() != static_cast<std::size_t>(n))
          throw ConfigError("schedule.scripted[" + std::to_string(t) + "]: expected " +
                            std::to_string(n) + " alphas, got " +
                            std::to_string(scripted[t].size()));
        for (double v : scripted[t])
          if (!(v >= 0.0) || !(v <= 1.0))
            throw ConfigError("schedule.scripted[" + std::to_string(t) +
                              "]: alpha outside [0, 1]");
      }
      return;
    }
    case ScheduleKind::StochasticSupport:
      validate_support(*this, n);
      return;
  }
}

ScheduleSpec as_stochastic_support(const ScheduleSpec& async_spec, int n) {
  if (async_spec.kind != ScheduleKind::Asynchronous)
    throw std::invalid_argument("as_stochastic_support: schedule is not asynchronous");
  ScheduleSpec spec;
  spec.kind = ScheduleKind::StochasticSupport;
  spec.seed = async_spec.seed;
  spec.support.resize(static_cast<std::size_t>(n));
  const double share = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    spec.support[i].members = {i};
    spec.support[i].probability = share;
    spec.partition_indices.push_back(i);
  }
  spec.open_alpha = OpenAlphaPolicy{0.0, 0.0};
  return spec;
}

int select_by_cumulative(double u, const std::vector<double>& cumulative) {
  for (std::size_t k = 0; k + 1 < cumulative.size(); ++k)
    if (u < cumulative[k]) return static_cast<int>(k);
  return static_cast<int>(cumulative.size()) - 1;
}

std::vector<double> support_cumulative(const ScheduleSpec& spec) {
  std::vector<double> cumulative(spec.support.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < spec.support.size(); ++k) {
    acc += spec.support[k].probability;
    cumulative[k] = acc;
  }
  return cumulative;
}

int stochastic_alphas_into(const ScheduleSpec& spec, long t, const RngStream& stream,
                           const std::vector<double>& cumulative, std::vector<double>& alphas) {
  RngStream::Draws draws = stream.at(static_cast<std::uint64_t>(t));
  const int pick = select_by_cumulative(draws.next_unit(), cumulative);
  for (double& a : alphas) a = 1.0;
  const auto& policy = spec.open_alpha;
  for (int agent : spec.support[pick].members) {
    if (policy.is_constant()) {
      alphas[agent] = policy.lo;
    } else {
      alphas[agent] = policy.lo + draws.next_unit() * (policy.hi - policy.lo);
    }
  }
  return pick;
}

namespace {

StubbornnessAssignment stochastic_assignment(const ScheduleSpec& spec, long t, int n,
                                             const RngStream& stream) {
  std::vector<double> alphas(static_cast<std::size_t>(n), 1.0);
  stochastic_alphas_into(spec, t, stream, support_cumulative(spec), alphas);
  return StubbornnessAssignment::from_alphas(std::move(alphas));
}

}  // namespace

StubbornnessAssignment next_assignment(const ScheduleSpec& spec, long t, int n,
                                       const RngStream& stream) {
  if (t < 0) throw ConfigError("next_assignment: t must be >= 0");
  switch (spec.kind) {
    case ScheduleKind::Synchronous:
      return StubbornnessAssignment::from_alphas(std::vector<double>(n, 0.0));
    case ScheduleKind::Asynchronous:
      return stochastic_assignment(as_stochastic_support(spec, n), t, n, stream);
    case ScheduleKind::Scripted: {
      if (static_cast<std::size_t>(t) >= spec.scripted.size())
        throw ConfigError("schedule.scripted: exhausted at t = " + std::to_string(t) + " (" +
                          std::to_string(spec.scripted.size()) + " rows)");
      if (spec.scripted[t].size() != static_cast<std::size_t>(n))
        throw ConfigError("schedule.scripted[" + std::to_string(t) + "]: expected " +
                          std::to_string(n) + " alphas");
      return StubbornnessAssignment::from_alphas(spec.scripted[t]);
    }
    case ScheduleKind::StochasticSupport:
      return stochastic_assignment(spec, t, n, stream);
  }
  throw ConfigError("next_assignment: unknown schedule kind");
}

double min_partition_probability(const ScheduleSpec& spec) {
  if (spec.kind != ScheduleKind::StochasticSupport)
    throw std::invalid_argument(
        "min_partition_probability: schedule is not stochastic-support; convert first");
  if (spec.partition_indices.empty())
    throw std::invalid_argument("min_partition_probability: no partition designated");
  double best = 1.0;
  for (int idx : spec.partition_indices)
    best = std::min(best, spec.support[idx].probability);
  return best;
}

std::optional<double> gamma_bound(const ScheduleSpec& spec) {
  switch (spec.kind) {
    case ScheduleKind::Synchronous:
    case ScheduleKind::Asynchronous:
      return 0.0;
    case ScheduleKind::StochasticSupport:
      return spec.open_alpha.is_constant() ? spec.open_alpha.lo : spec.open_alpha.hi;
    case ScheduleKind::Scripted: {
      double g = 0.0;
      for (const auto& row : spec.scripted)
        for (double v : row)
          if (v < 1.0) g = std::max(g, v);
      return g;
    }
  }
  return std::nullopt;
}

}  // namespace mhk
