#include "mhk/dynamics.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "mhk/errors.hpp"

namespace mhk {

OpinionState::OpinionState(long t, int n, int d, double epsilon, std::vector<double> coords)
    : t(t), n(n), d(d), epsilon(epsilon), coords(std::move(coords)) {
  if (n < 1) throw ConfigError("opinion state: n must be >= 1, got " + std::to_string(n));
  if (d < 1) throw ConfigError("opinion state: d must be >= 1, got " + std::to_string(d));
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw ConfigError("opinion state: epsilon must be finite and > 0");
  if (this->coords.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d))
    throw ConfigError("opinion state: expected " + std::to_string(static_cast<long>(n) * d) +
                      " coordinates, got " + std::to_string(this->coords.size()));
  for (double v : this->coords)
    if (!std::isfinite(v)) throw ConfigError("opinion state: coordinates must be finite");
}

StubbornnessAssignment StubbornnessAssignment::from_alphas(std::vector<double> alphas) {
  StubbornnessAssignment a;
  a.alphas = std::move(alphas);
  for (std::size_t i = 0; i < a.alphas.size(); ++i) {
    double v = a.alphas[i];
    if (!(v >= 0.0) || !(v <= 1.0))
      throw ConfigError("stubbornness: alpha_" + std::to_string(i + 1) + " = " +
                        std::to_string(v) + " outside [0, 1]");
    if (v < 1.0) a.open_set.push_back(static_cast<int>(i));
  }
  return a;
}

double squared_distance(const OpinionState& s, int i, int j) {
  const double* xi = s.coords.data() + static_cast<std::size_t>(i) * s.d;
  const double* xj = s.coords.data() + static_cast<std::size_t>(j) * s.d;
  double d2 = 0.0;
  for (int c = 0; c < s.d; ++c) {
    double diff = xi[c] - xj[c];
    d2 += diff * diff;
  }
  return d2;
}

std::vector<Neighborhood> compute_neighborhoods(const OpinionState& s) {
  const double eps2 = s.epsilon * s.epsilon;
  std::vector<Neighborhood> out(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i) {
    out[i].agent = i;
    out[i].members.reserve(4);
  }
  for (int i = 0; i < s.n; ++i) {
    out[i].members.push_back(i);
    for (int j = i + 1; j < s.n; ++j) {
      if (squared_distance(s, i, j) <= eps2) {
        out[i].members.push_back(j);
        out[j].members.push_back(i);
      }
    }
  }
  // Members arrive out of order for j < i; restore ascending order.
  for (auto& nb : out) {
    auto& m = nb.members;
    for (std::size_t k = 1; k < m.size(); ++k) {
      int v = m[k];
      std::size_t p = k;
      while (p > 0 && m[p - 1] > v) {
        m[p] = m[p - 1];
        --p;
      }
      m[p] = v;
    }
  }
  return out;
}

namespace {

void check_assignment(const OpinionState& s, const StubbornnessAssignment& a) {
  if (a.alphas.size() != static_cast<std::size_t>(s.n))
    throw ConfigError("stubbornness: got " + std::to_string(a.alphas.size()) +
                      " alphas for n = " + std::to_string(s.n));
}

}  // namespace

OpinionState step(const OpinionState& s, const StubbornnessAssignment& a) {
  return step(s, a, compute_neighborhoods(s));
}

OpinionState step(const OpinionState& s, const StubbornnessAssignment& a,
                  const std::vector<Neighborhood>& nbhd) {
  check_assignment(s, a);
  if (nbhd.size() != static_cast<std::size_t>(s.n))
    throw ConfigError("step: neighborhood list does not match state size");
  std::vector<double> next(s.coords.size());
  std::vector<double> avg(static_cast<std::size_t>(s.d));
  for (int i = 0; i < s.n; ++i) {
    const double alpha = a.alphas[i];
    const auto& members = nbhd[i].members;
    const std::size_t base = static_cast<std::size_t>(i) * s.d;
    if (alpha == 1.0 || members.size() == 1) {
      for (int c = 0; c < s.d; ++c) next[base + c] = s.coords[base + c];
      continue;
    }
    const double k = static_cast<double>(members.size());
    bool at_average = true;
    for (int c = 0; c < s.d; ++c) {
      double sum = 0.0;
      for (int j : members) sum += s.coords[static_cast<std::size_t>(j) * s.d + c];
      avg[c] = sum / k;
      at_average = at_average && std::bit_cast<std::uint64_t>(avg[c]) ==
                                     std::bit_cast<std::uint64_t>(s.coords[base + c]);
    }
    if (at_average) {
      for (int c = 0; c < s.d; ++c) next[base + c] = s.coords[base + c];
      continue;
    }
    for (int c = 0; c < s.d; ++c)
      next[base + c] = alpha * s.coords[base + c] + (1.0 - alpha) * avg[c];
  }
  return OpinionState(s.t + 1, s.n, s.d, s.epsilon, std::move(next));
}

std::vector<double> update_matrix(const OpinionState& s, const StubbornnessAssignment& a) {
  check_assignment(s, a);
  auto nbhd = compute_neighborhoods(s);
  std::vector<double> w(static_cast<std::size_t>(s.n) * s.n, 0.0);
  for (int i = 0; i < s.n; ++i) {
    const double alpha = a.alphas[i];
    const double share = (1.0 - alpha) / static_cast<double>(nbhd[i].members.size());
    double* row = w.data() + static_cast<std::size_t>(i) * s.n;
    for (int j : nbhd[i].members) row[j] = share;
    row[i] += alpha;
  }
  return w;
}

OpinionState step_matrix(const OpinionState& s, const StubbornnessAssignment& a) {
  auto w = update_matrix(s, a);
  std::vector<double> next(s.coords.size(), 0.0);
  for (int i = 0; i < s.n; ++i) {
    const double* row = w.data() + static_cast<std::size_t>(i) * s.n;
    for (int c = 0; c < s.d; ++c) {
      double acc = 0.0;
      for (int j = 0; j < s.n; ++j) acc += row[j] * s.coords[static_cast<std::size_t>(j) * s.d + c];
      next[static_cast<std::size_t>(i) * s.d + c] = acc;
    }
  }
  return OpinionState(s.t + 1, s.n, s.d, s.epsilon, std::move(next));
}

bool opinions_equal(const OpinionState& s, int i, int j) {
  const double* xi = s.coords.data() + static_cast<std::size_t>(i) * s.d;
  const double* xj = s.coords.data() + static_cast<std::size_t>(j) * s.d;
  for (int c = 0; c < s.d; ++c)
    if (xi[c] != xj[c]) return false;
  return true;
}

std::vector<std::pair<int, int>> detect_merge(const OpinionState& prev, const OpinionState& next) {
  if (prev.n != next.n || prev.d != next.d)
    throw ConfigError("detect_merge: states have mismatched shape");
  std::vector<std::pair<int, int>> merges;
  for (int i = 0; i < next.n; ++i)
    for (int j = i + 1; j < next.n; ++j)
      if (opinions_equal(next, i, j) && !opinions_equal(prev, i, j)) merges.emplace_back(i, j);
  return merges;
}

}  // namespace mhk
