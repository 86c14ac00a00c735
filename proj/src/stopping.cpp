#include "mhk/stopping.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mhk/profile.hpp"

namespace mhk {

std::optional<long> StoppingReport::tau_hat_at(int m) const {
  if (m < m_min || m > m_max) return std::nullopt;
  return tau_hat[static_cast<std::size_t>(m - m_min)];
}

StoppingScanner::StoppingScanner(const StoppingConfig& cfg, double epsilon)
    : cfg_(cfg), epsilon_(epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("stopping scan: epsilon must be > 0");
  if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta))
    throw std::invalid_argument("stopping scan: delta must be finite and > 0");
  if (cfg.m_min < 4 || cfg.m_max < cfg.m_min)
    throw std::invalid_argument("stopping scan: need 4 <= m_min <= m_max, got [" +
                                std::to_string(cfg.m_min) + ", " + std::to_string(cfg.m_max) +
                                "]");
  delta2_ = cfg.delta * cfg.delta;
  const double half = epsilon / 2.0;
  half_eps2_ = half * half;
  equivalences_active_ = cfg.check_equivalences && cfg.delta <= epsilon / 4.0;
  // One threshold past m_max closes the last nontrivial-step window.
  for (int m = cfg.m_min; m <= cfg.m_max + 1; ++m) {
    const double r = epsilon / static_cast<double>(m);
    thr2_.push_back(r * r);
  }
  tau_hat_.resize(thr2_.size());
  window_count_.assign(static_cast<std::size_t>(cfg.m_max - cfg.m_min + 1), 0);
  window_first_.resize(window_count_.size());
}

void StoppingScanner::observe(const StepFacts& facts) {
  if (finished_) throw std::logic_error("stopping scan: observe after finish");
  if (facts.t != expect_t_)
    throw std::logic_error("stopping scan: expected step " + std::to_string(expect_t_) +
                           ", got " + std::to_string(facts.t));
  ++expect_t_;
  const long t = facts.t;
  const double m2 = facts.max_comp_dist2;

  if (!tau_delta_ && m2 <= delta2_) tau_delta_ = t;
  for (std::size_t k = 0; k < thr2_.size(); ++k)
    if (!tau_hat_[k] && m2 <= thr2_[k]) tau_hat_[k] = t;

  // t lies in window [tau_hat_m, tau_hat_{m+1}) exactly when the first
  // threshold is already hit and the next one is not (hits this very step
  // were just recorded above, so "not hit" really means t < tau_hat_{m+1}).
  for (std::size_t k = 0; k < window_count_.size(); ++k) {
    if (tau_hat_[k] && !tau_hat_[k + 1] && m2 > thr2_[k]) {
      ++window_count_[k];
      if (!window_first_[k]) window_first_[k] = t;
    }
  }

  if (t > 0 && facts.edges_changed) last_edge_change_ = t;
  if (t > 0 && facts.state_changed) last_state_change_ = t;
  if (!first_steady_ && facts.steady_certified) first_steady_ = t;
  for (const auto& pr : facts.merges) merge_times_.emplace_back(t, pr);

  if (equivalences_active_ && t > 0 && prev_max_dist2_ <= delta2_) {
    const bool c1 = m2 > delta2_;
    const bool c2 = facts.cross_component_edge;
    const bool c3 = m2 > half_eps2_;
    if (c1 != c2 || c2 != c3) violations_.push_back({t - 1, c1, c2, c3});
  }
  prev_max_dist2_ = m2;
}

StoppingReport StoppingScanner::finish() {
  if (finished_) throw std::logic_error("stopping scan: finish called twice");
  if (expect_t_ == 0) throw std::logic_error("stopping scan: no steps observed");
  finished_ = true;

  StoppingReport r;
  r.epsilon = epsilon_;
  r.delta = cfg_.delta;
  r.m_min = cfg_.m_min;
  r.m_max = cfg_.m_max;
  r.horizon = expect_t_ - 1;
  r.tau_delta = tau_delta_;
  r.tau_hat.assign(tau_hat_.begin(), tau_hat_.end() - 1);  // drop the internal m_max+1 entry
  r.merge_times = std::move(merge_times_);
  r.last_edge_change = last_edge_change_;
  r.last_state_change = last_state_change_;
  r.certified_steady_from = first_steady_;
  r.equivalence_violations = std::move(violations_);
  r.equivalences_checked = equivalences_active_;

  for (std::size_t k = 0; k < r.tau_hat.size(); ++k) {
    if (r.tau_hat[k] && last_edge_change_ <= *r.tau_hat[k]) {
      r.freeze_m = cfg_.m_min + static_cast<int>(k);
      r.freeze_from = r.tau_hat[k];
      break;
    }
  }

  if (first_steady_)
    r.termination_time = last_state_change_;
  else if (last_state_change_ < r.horizon)
    r.termination_time = last_state_change_;

  for (std::size_t k = 0; k < window_count_.size(); ++k) {
    AWindow w;
    w.m = cfg_.m_min + static_cast<int>(k);
    w.start = tau_hat_[k];
    w.end = tau_hat_[k + 1];
    w.nontrivial_steps = window_count_[k];
    w.first_nontrivial = window_first_[k];
    r.a_windows.push_back(w);
    if (w.first_nontrivial) r.a_set.push_back(*w.first_nontrivial);
  }
  return r;
}

namespace {

bool bits_differ(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return true;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return true;
  return false;
}

StoppingReport scan_trajectory(const Trajectory& traj, const StoppingConfig& cfg) {
  if (traj.steps.empty()) throw std::invalid_argument("stopping scan: empty trajectory");
  StoppingConfig effective = cfg;
  if (effective.delta == 0.0) effective.delta = traj.delta;
  StoppingScanner scan(effective, traj.epsilon);

  std::vector<std::pair<int, int>> prev_edges;
  std::vector<int> prev_comp;
  for (std::size_t idx = 0; idx < traj.steps.size(); ++idx) {
    const OpinionState state = traj.state_at(idx);
    ProfileGraph prof = build_profile(state);

    StepFacts f;
    f.t = traj.steps[idx].t;
    f.max_comp_dist2 = max_intra_component_dist2(prof, state);
    if (idx > 0) {
      f.edges_changed = prof.edges != prev_edges;
      for (const auto& [i, j] : prof.edges) {
        if (prev_comp[i] != prev_comp[j]) {
          f.cross_component_edge = true;
          break;
        }
      }
      f.state_changed = bits_differ(traj.steps[idx].coords, traj.steps[idx - 1].coords);
    }
    f.steady_certified = is_steady_state(state, compute_neighborhoods(state));
    f.merges = traj.steps[idx].merges;
    scan.observe(f);

    prev_edges = std::move(prof.edges);
    prev_comp = std::move(prof.component_of);
  }
  return scan.finish();
}

}  // namespace

StoppingReport analyze_stopping(const Trajectory& traj, const StoppingConfig& cfg) {
  return scan_trajectory(traj, cfg);
}

std::optional<long> detect_tau_delta(const Trajectory& traj, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("detect_tau_delta: delta must be finite and > 0");
  StoppingConfig cfg;
  cfg.delta = delta;
  cfg.check_equivalences = false;
  return scan_trajectory(traj, cfg).tau_delta;
}

FreezeVerdict detect_freeze(const Trajectory& traj, int m_min, int m_max) {
  StoppingConfig cfg;
  cfg.delta = traj.delta;
  cfg.m_min = m_min;
  cfg.m_max = m_max;
  cfg.check_equivalences = false;
  const StoppingReport r = scan_trajectory(traj, cfg);
  return {r.freeze_m, r.freeze_from, r.last_edge_change};
}

TerminationVerdict detect_termination(const Trajectory& traj) {
  StoppingConfig cfg;
  cfg.delta = traj.delta;
  cfg.check_equivalences = false;
  const StoppingReport r = scan_trajectory(traj, cfg);
  return {r.termination_time, r.certified_steady_from};
}

std::vector<EquivalenceViolation> check_interaction_equivalences(const Trajectory& traj,
                                                                 double delta) {
  if (!(delta > 0.0) || !(delta <= traj.epsilon / 4.0))
    throw std::invalid_argument("check_interaction_equivalences: need 0 < delta <= epsilon/4");
  StoppingConfig cfg;
  cfg.delta = delta;
  cfg.check_equivalences = true;
  return scan_trajectory(traj, cfg).equivalence_violations;
}

}  // namespace mhk
