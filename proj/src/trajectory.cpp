#include "mhk/trajectory.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mhk/errors.hpp"
#include "mhk/profile.hpp"

namespace mhk {

OpinionState Trajectory::state_at(std::size_t idx) const {
  const auto& rec = steps.at(idx);
  return OpinionState(rec.t, n, d, epsilon, rec.coords);
}

StubbornnessAssignment Trajectory::assignment_at(std::size_t idx) const {
  const auto& rec = steps.at(idx);
  if (rec.alphas.empty())
    throw std::out_of_range("assignment_at: record " + std::to_string(idx) +
                            " stores no assignment (final step)");
  StubbornnessAssignment a;
  a.alphas = rec.alphas;
  a.open_set = rec.open_set;
  return a;
}

bool is_steady_state(const OpinionState& s, const std::vector<Neighborhood>& nbhd) {
  // Mirrors the copy conditions of step() that hold for every alpha: a
  // singleton neighborhood, or an opinion already sitting bit-for-bit on its
  // neighborhood average.  (alpha == 1 freezes an agent for one step but
  // certifies nothing about later draws, so it does not count here.)
  for (int i = 0; i < s.n; ++i) {
    const auto& members = nbhd[i].members;
    if (members.size() == 1) continue;
    const double k = static_cast<double>(members.size());
    for (int c = 0; c < s.d; ++c) {
      double sum = 0.0;
      for (int j : members) sum += s.coords[static_cast<std::size_t>(j) * s.d + c];
      const double avg = sum / k;
      if (std::bit_cast<std::uint64_t>(avg) !=
          std::bit_cast<std::uint64_t>(s.at(i, c)))
        return false;
    }
  }
  return true;
}

Trajectory run_trajectory(const ScenarioConfig& sc, const RunOptions& opt) {
  sc.validate();
  long horizon = sc.horizon;
  if (opt.horizon_override) {
    horizon = *opt.horizon_override;
    if (horizon < 1) throw ConfigError("horizon override must be >= 1");
    if (sc.schedule.kind == ScheduleKind::Scripted &&
        static_cast<long>(sc.schedule.scripted.size()) < horizon)
      throw ConfigError("scripted schedule has " + std::to_string(sc.schedule.scripted.size()) +
                        " rows, fewer than horizon " + std::to_string(horizon));
  }

  Trajectory traj;
  traj.n = sc.n;
  traj.d = sc.d;
  traj.epsilon = sc.epsilon;
  traj.delta = sc.delta;
  traj.master_seed = sc.master_seed;
  traj.schedule_kind = sc.schedule.kind;
  traj.steps.reserve(static_cast<std::size_t>(horizon) + 1);

  RngStream stream = schedule_stream(sc, opt.run_index);
  OpinionState state = materialize_initial(sc, opt.run_index);
  OpinionState prev;
  double prev_z = 0.0;

  for (long t = 0;; ++t) {
    state.t = t;
    const auto nbhd = compute_neighborhoods(state);
    const auto prof = build_profile(state);

    StepRecord rec;
    rec.t = t;
    rec.coords = state.coords;
    rec.edge_count = static_cast<int>(prof.edges.size());
    rec.component_count = prof.component_count();
    rec.z = energy(state);
    if (t > 0) {
      traj.steps.back().decrement = prev_z - rec.z;
      rec.merges = detect_merge(prev, state);
    }
    if (!traj.steady_from && is_steady_state(state, nbhd)) traj.steady_from = t;

    const bool stop_now = traj.steady_from && opt.stop_on_termination;
    if (t == horizon || stop_now) {
      traj.steps.push_back(std::move(rec));
      break;
    }

    const StubbornnessAssignment assn = next_assignment(sc.schedule, t, sc.n, stream);
    OpinionState next = step(state, assn, nbhd);
    rec.alphas = assn.alphas;
    rec.open_set = assn.open_set;
    rec.nl8_bound = nl8_decrement_bound(state, next, assn, nbhd);
    prev_z = rec.z;
    traj.steps.push_back(std::move(rec));
    prev = std::move(state);
    state = std::move(next);
  }
  return traj;
}

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool all_same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i], b[i])) return false;
  return true;
}

bool same_optional_bits(const std::optional<double>& a, double b) {
  return a.has_value() && same_bits(*a, b);
}

}  // namespace

TrajectoryAudit audit_trajectory(const Trajectory& traj) {
  constexpr double kSlack = 1e-9;
  TrajectoryAudit audit;
  if (traj.steps.empty()) return audit;

  OpinionState cur = traj.state_at(0);
  if (!same_bits(energy(cur), traj.steps[0].z)) ++audit.z_mismatches;

  for (std::size_t idx = 0; idx < traj.steps.size(); ++idx) {
    const ProfileGraph prof = build_profile(traj.state_at(idx));
    if (traj.steps[idx].edge_count != static_cast<int>(prof.edges.size()) ||
        traj.steps[idx].component_count != prof.component_count())
      ++audit.profile_mismatches;
  }

  for (std::size_t idx = 0; idx + 1 < traj.steps.size(); ++idx) {
    const StepRecord& rec = traj.steps[idx];
    const StepRecord& nxt = traj.steps[idx + 1];
    ++audit.transitions;

    const OpinionState next_stored = traj.state_at(idx + 1);
    const StubbornnessAssignment assn = traj.assignment_at(idx);
    const OpinionState replayed = step(cur, assn);
    if (!all_same_bits(replayed.coords, next_stored.coords)) ++audit.replay_mismatches;

    const double z_next = energy(next_stored);
    if (!same_bits(z_next, nxt.z)) ++audit.z_mismatches;
    if (!same_optional_bits(rec.decrement, rec.z - z_next)) ++audit.decrement_mismatches;
    const double bound = nl8_decrement_bound(cur, next_stored, assn);
    if (!same_optional_bits(rec.nl8_bound, bound)) ++audit.nl8_mismatches;

    if (z_next > rec.z + kSlack) ++audit.energy_increases;
    if (rec.decrement && rec.nl8_bound && *rec.decrement < *rec.nl8_bound - kSlack)
      ++audit.decrement_bound_failures;

    // Every updated opinion is a convex combination of current opinions, so
    // next-step coordinates stay inside the current bounding box (up to an
    // ulp of round-off per blend).
    for (int c = 0; c < traj.d; ++c) {
      double lo = cur.at(0, c), hi = cur.at(0, c);
      for (int i = 1; i < traj.n; ++i) {
        lo = std::min(lo, cur.at(i, c));
        hi = std::max(hi, cur.at(i, c));
      }
      for (int i = 0; i < traj.n; ++i) {
        const double v = next_stored.at(i, c);
        if (v < lo - kSlack || v > hi + kSlack) {
          ++audit.box_escapes;
          break;
        }
      }
    }

    if (nxt.merges != detect_merge(cur, next_stored)) ++audit.merge_mismatches;
    cur = next_stored;
  }

  if (!traj.steps[0].merges.empty()) ++audit.merge_mismatches;
  const StepRecord& last = traj.steps.back();
  if (!last.alphas.empty() || last.decrement || last.nl8_bound) ++audit.replay_mismatches;
  return audit;
}

}  // namespace mhk
