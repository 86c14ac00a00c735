#include "mhk/monte_carlo.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "mhk/errors.hpp"
#include "mhk/rng.hpp"
#include "mhk/schedule.hpp"

namespace mhk {

namespace {

double pow10_of(int n) {
  double r = 1.0;
  for (int k = 0; k < 10; ++k) r *= static_cast<double>(n);
  return r;
}

void check_hypotheses(int n, double gamma, double min_partition_prob) {
  if (n < 1) throw std::domain_error("expectation bound: n must be >= 1");
  if (!(gamma >= 0.0) || !(gamma < 1.0))
    throw std::domain_error("expectation bound: need 0 <= gamma < 1, got " +
                            std::to_string(gamma));
  if (!(min_partition_prob > 0.0))
    throw std::domain_error("expectation bound: need min partition probability > 0");
}

}  // namespace

double co1_bound(int n, double epsilon, double delta, double gamma, double min_partition_prob) {
  check_hypotheses(n, gamma, min_partition_prob);
  if (!(epsilon > 0.0) || !(delta > 0.0))
    throw std::domain_error("expectation bound: epsilon and delta must be > 0");
  const double one_minus = 1.0 - gamma;
  const double denom = 8.0 * (one_minus * one_minus) * min_partition_prob;
  const double ratio = epsilon / delta;
  return (pow10_of(n) / denom) * (ratio * ratio);
}

double a_set_bound(int n, double gamma, double min_partition_prob) {
  check_hypotheses(n, gamma, min_partition_prob);
  const double one_minus = 1.0 - gamma;
  const double denom = 2.0 * (one_minus * one_minus) * min_partition_prob;
  return pow10_of(n) / denom;
}

namespace {

int uf_find(std::vector<int>& parent, int a) {
  while (parent[a] != a) {
    parent[a] = parent[parent[a]];
    a = parent[a];
  }
  return a;
}

// One ensemble run with reusable flat buffers; the update arithmetic mirrors
// step() exactly (same summation order, same copy-vs-blend branches), and
// the draws go through stochastic_alphas_into, so a run here is bitwise the
// trajectory run_trajectory would produce for the same run index.
RunOutcome simulate_run(const ScenarioConfig& sc, const ScheduleSpec& spec,
                        const std::vector<double>& cumulative, std::uint64_t run, long horizon,
                        double delta2) {
  const int n = sc.n;
  const int d = sc.d;
  const double eps2 = sc.epsilon * sc.epsilon;

  OpinionState init = materialize_initial(sc, run);
  RngStream stream = schedule_stream(sc, run);
  std::vector<double> x = std::move(init.coords);
  std::vector<double> next(x.size());
  std::vector<double> alphas(static_cast<std::size_t>(n));
  std::vector<double> avg(static_cast<std::size_t>(d));
  std::vector<double> d2(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<int> parent(static_cast<std::size_t>(n));

  RunOutcome out;
  out.run_index = run;

  long t = 0;
  for (;; ++t) {
    for (int i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i) * n + i] = 0.0;
      for (int j = i + 1; j < n; ++j) {
        double dd = 0.0;
        for (int c = 0; c < d; ++c) {
          const double diff = x[static_cast<std::size_t>(i) * d + c] -
                              x[static_cast<std::size_t>(j) * d + c];
          dd += diff * diff;
        }
        d2[static_cast<std::size_t>(i) * n + j] = dd;
        d2[static_cast<std::size_t>(j) * n + i] = dd;
      }
    }

    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (d2[static_cast<std::size_t>(i) * n + j] <= eps2) {
          int ra = uf_find(parent, i);
          int rb = uf_find(parent, j);
          if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
        }
      }
    }

    double max_comp_d2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (uf_find(parent, i) == uf_find(parent, j))
          max_comp_d2 = std::max(max_comp_d2, d2[static_cast<std::size_t>(i) * n + j]);

    if (max_comp_d2 <= delta2) {
      out.tau_delta = t;
      break;
    }

    bool steady = true;
    for (int i = 0; i < n && steady; ++i) {
      int k = 0;
      for (int j = 0; j < n; ++j)
        if (d2[static_cast<std::size_t>(i) * n + j] <= eps2) ++k;
      if (k == 1) continue;
      const double kd = static_cast<double>(k);
      for (int c = 0; c < d && steady; ++c) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j)
          if (d2[static_cast<std::size_t>(i) * n + j] <= eps2)
            sum += x[static_cast<std::size_t>(j) * d + c];
        const double a = sum / kd;
        steady = std::bit_cast<std::uint64_t>(a) ==
                 std::bit_cast<std::uint64_t>(x[static_cast<std::size_t>(i) * d + c]);
      }
    }
    if (steady) {
      out.certified_stuck = true;
      break;
    }
    if (t == horizon) break;

    stochastic_alphas_into(spec, t, stream, cumulative, alphas);
    for (int i = 0; i < n; ++i) {
      const double alpha = alphas[i];
      const std::size_t base = static_cast<std::size_t>(i) * d;
      int k = 0;
      for (int j = 0; j < n; ++j)
        if (d2[static_cast<std::size_t>(i) * n + j] <= eps2) ++k;
      if (alpha == 1.0 || k == 1) {
        for (int c = 0; c < d; ++c) next[base + c] = x[base + c];
        continue;
      }
      const double kd = static_cast<double>(k);
      bool at_average = true;
      for (int c = 0; c < d; ++c) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j)
          if (d2[static_cast<std::size_t>(i) * n + j] <= eps2)
            sum += x[static_cast<std::size_t>(j) * d + c];
        avg[c] = sum / kd;
        at_average = at_average && std::bit_cast<std::uint64_t>(avg[c]) ==
                                       std::bit_cast<std::uint64_t>(x[base + c]);
      }
      if (at_average) {
        for (int c = 0; c < d; ++c) next[base + c] = x[base + c];
        continue;
      }
      for (int c = 0; c < d; ++c)
        next[base + c] = alpha * x[base + c] + (1.0 - alpha) * avg[c];
    }
    std::swap(x, next);
  }

  out.stop_t = t;
  out.final_coords = x;
  return out;
}

}  // namespace

EnsembleResult run_ensemble(const ScenarioConfig& sc, long runs, long horizon, int threads) {
  sc.validate();
  if (runs < 1) throw ConfigError("ensemble: runs must be >= 1");
  if (horizon < 1) throw ConfigError("ensemble: horizon must be >= 1");
  if (sc.schedule.kind != ScheduleKind::Asynchronous &&
      sc.schedule.kind != ScheduleKind::StochasticSupport)
    throw ConfigError("ensemble: schedule kind '" + to_string(sc.schedule.kind) +
                      "' has no support probabilities; the expectation bound needs a stochastic "
                      "schedule (asynchronous or stochastic_support)");

  const ScheduleSpec spec = sc.schedule.kind == ScheduleKind::Asynchronous
                                ? as_stochastic_support(sc.schedule, sc.n)
                                : sc.schedule;
  const double gamma = gamma_bound(spec).value();
  const double p_min = min_partition_probability(spec);
  const std::vector<double> cumulative = support_cumulative(spec);
  const double delta2 = sc.delta * sc.delta;

  EnsembleResult res;
  res.runs = runs;
  res.horizon = horizon;
  res.n = sc.n;
  res.epsilon = sc.epsilon;
  res.delta = sc.delta;
  res.gamma = gamma;
  res.min_partition_prob = p_min;
  res.bound = co1_bound(sc.n, sc.epsilon, sc.delta, gamma, p_min);
  res.window_bound = a_set_bound(sc.n, gamma, p_min);
  res.outcomes.resize(static_cast<std::size_t>(runs));

  int nthreads = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : threads;
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(std::min<long>(runs, 64))));

  if (nthreads == 1) {
    for (long r = 0; r < runs; ++r)
      res.outcomes[static_cast<std::size_t>(r)] =
          simulate_run(sc, spec, cumulative, static_cast<std::uint64_t>(r), horizon, delta2);
  } else {
    std::mutex error_mu;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (long r = w; r < runs; r += nthreads)
            res.outcomes[static_cast<std::size_t>(r)] =
                simulate_run(sc, spec, cumulative, static_cast<std::uint64_t>(r), horizon, delta2);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  res.tau_samples.reserve(res.outcomes.size());
  double sum = 0.0;
  for (const RunOutcome& o : res.outcomes) {
    res.tau_samples.push_back(o.tau_delta);
    res.total_steps += o.stop_t;
    if (o.tau_delta) {
      ++res.reached;
      sum += static_cast<double>(*o.tau_delta);
    } else {
      res.flagged_unreached.push_back(o.run_index);
    }
  }
  res.reached_fraction = static_cast<double>(res.reached) / static_cast<double>(runs);
  if (res.reached > 0) {
    const double mean = sum / static_cast<double>(res.reached);
    res.mean_tau = mean;
    if (res.reached > 1) {
      double ss = 0.0;
      for (const RunOutcome& o : res.outcomes) {
        if (!o.tau_delta) continue;
        const double dev = static_cast<double>(*o.tau_delta) - mean;
        ss += dev * dev;
      }
      const double var = ss / static_cast<double>(res.reached - 1);
      res.stderr_tau = std::sqrt(var / static_cast<double>(res.reached));
    }
  }
  return res;
}

}  // namespace mhk
