#include "mhk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mhk/errors.hpp"

namespace mhk {

double energy(const OpinionState& s) {
  const double eps2 = s.epsilon * s.epsilon;
  double z = 0.0;
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) z += std::min(squared_distance(s, i, j), eps2);
  return z;
}

double nl8_decrement_bound(const OpinionState& prev, const OpinionState& next,
                           const StubbornnessAssignment& a,
                           const std::vector<Neighborhood>& nbhd) {
  if (prev.n != next.n || prev.d != next.d)
    throw ConfigError("nl8_decrement_bound: states have mismatched shape");
  if (a.alphas.size() != static_cast<std::size_t>(prev.n))
    throw ConfigError("nl8_decrement_bound: alpha count mismatch");
  double total = 0.0;
  for (int i = 0; i < prev.n; ++i) {
    double disp2 = 0.0;
    for (int c = 0; c < prev.d; ++c) {
      double diff = next.at(i, c) - prev.at(i, c);
      disp2 += diff * diff;
    }
    const double alpha = a.alphas[i];
    double w = 1.0;
    if (alpha < 1.0)
      w += static_cast<double>(nbhd[i].members.size()) * alpha / (1.0 - alpha);
    total += w * disp2;
  }
  return 4.0 * total;
}

double nl8_decrement_bound(const OpinionState& prev, const OpinionState& next,
                           const StubbornnessAssignment& a) {
  return nl8_decrement_bound(prev, next, a, compute_neighborhoods(prev));
}

double beta(const StubbornnessAssignment& a) {
  const auto n = static_cast<double>(a.alphas.size());
  if (a.alphas.empty()) throw std::invalid_argument("beta: empty assignment");
  double best = a.alphas[0];  // (0, 0) pair; every other pair only raises it
  for (std::size_t i = 0; i < a.alphas.size(); ++i)
    for (std::size_t j = 0; j < a.alphas.size(); ++j) {
      if (a.alphas[i] < a.alphas[j]) continue;
      best = std::max(best, a.alphas[i] - (a.alphas[i] - a.alphas[j]) / n);
    }
  return best;
}

double beta_strict(const StubbornnessAssignment& a) {
  const auto n = static_cast<double>(a.alphas.size());
  if (a.alphas.size() < 2) throw std::invalid_argument("beta_strict: needs n >= 2");
  bool seeded = false;
  double best = 0.0;
  for (std::size_t i = 0; i < a.alphas.size(); ++i)
    for (std::size_t j = 0; j < a.alphas.size(); ++j) {
      if (i == j || a.alphas[i] < a.alphas[j]) continue;
      double v = a.alphas[i] - (a.alphas[i] - a.alphas[j]) / n;
      if (!seeded || v > best) {
        best = v;
        seeded = true;
      }
    }
  return best;
}

void ConvergenceTracker::observe(const OpinionState& s, const StubbornnessAssignment& a,
                                 const std::vector<Neighborhood>& nbhd) {
  if (agent_ < 0 || agent_ >= s.n) throw std::invalid_argument("tracker: agent out of range");
  const auto& members = nbhd[agent_].members;
  double max2 = 0.0;
  for (int j : members)
    if (j != agent_) max2 = std::max(max2, squared_distance(s, agent_, j));
  const double reach = std::sqrt(max2);
  const double k = static_cast<double>(members.size());
  const double summand = (1.0 - a.alphas[agent_]) * (1.0 - 1.0 / k) * reach;
  partial_sum_ += summand;
  summands_.push_back(summand);

  auto p = s.opinion(agent_);
  window_.emplace_back(p.begin(), p.end());
  if (window_.size() > window_capacity_) window_.erase(window_.begin());
}

}  // namespace mhk
