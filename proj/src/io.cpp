#include "mhk/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mhk/errors.hpp"

namespace mhk {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kFormatTag = "mhk-trajectory-v1";

ScheduleKind kind_from_string(const std::string& s, const std::string& origin) {
  if (s == "synchronous") return ScheduleKind::Synchronous;
  if (s == "asynchronous") return ScheduleKind::Asynchronous;
  if (s == "scripted") return ScheduleKind::Scripted;
  if (s == "stochastic_support") return ScheduleKind::StochasticSupport;
  throw ConfigError(origin + ": unknown schedule kind '" + s + "'");
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open file for writing: " + path);
  return out;
}

ordered_json record_json(const Trajectory& traj, const StepRecord& rec, bool first) {
  ordered_json line;
  line["t"] = rec.t;
  if (first) {
    line["format"] = kFormatTag;
    line["n"] = traj.n;
    line["d"] = traj.d;
    line["epsilon"] = traj.epsilon;
    line["delta"] = traj.delta;
    line["master_seed"] = traj.master_seed;
    line["schedule"] = to_string(traj.schedule_kind);
    if (traj.steady_from) line["steady_from"] = *traj.steady_from;
  }
  ordered_json xs = ordered_json::array();
  for (int i = 0; i < traj.n; ++i) {
    ordered_json point = ordered_json::array();
    for (int c = 0; c < traj.d; ++c)
      point.push_back(rec.coords[static_cast<std::size_t>(i) * traj.d + c]);
    xs.push_back(std::move(point));
  }
  line["x"] = std::move(xs);
  if (!rec.alphas.empty()) {
    line["alpha"] = rec.alphas;
    ordered_json open = ordered_json::array();
    for (int i : rec.open_set) open.push_back(i + 1);
    line["open"] = std::move(open);
  }
  line["edges"] = rec.edge_count;
  line["components"] = rec.component_count;
  line["z"] = rec.z;
  if (rec.decrement) line["decrement"] = *rec.decrement;
  if (rec.nl8_bound) line["nl8_bound"] = *rec.nl8_bound;
  if (!rec.merges.empty()) {
    ordered_json merges = ordered_json::array();
    for (const auto& [i, j] : rec.merges) merges.push_back(ordered_json::array({i + 1, j + 1}));
    line["merges"] = std::move(merges);
  }
  return line;
}

}  // namespace

void export_trajectory_jsonl(const Trajectory& traj, const std::string& path) {
  if (traj.steps.empty()) throw ConfigError("export: trajectory has no steps");
  std::ofstream out = open_for_write(path);
  for (std::size_t idx = 0; idx < traj.steps.size(); ++idx)
    out << record_json(traj, traj.steps[idx], idx == 0).dump() << '\n';
  if (!out) throw ConfigError("write failed: " + path);
}

void export_trajectory_csv(const Trajectory& traj, const std::string& path) {
  if (traj.steps.empty()) throw ConfigError("export: trajectory has no steps");
  std::ofstream out = open_for_write(path);
  out << 't';
  for (int i = 1; i <= traj.n; ++i)
    for (int c = 1; c <= traj.d; ++c) out << ",x_" << i << '_' << c;
  for (int i = 1; i <= traj.n; ++i) out << ",alpha_" << i;
  out << ",Z,decrement,nl8_bound,merges\n";
  for (const StepRecord& rec : traj.steps) {
    out << rec.t;
    for (double v : rec.coords) out << ',' << format_shortest(v);
    if (rec.alphas.empty()) {
      for (int i = 0; i < traj.n; ++i) out << ',';
    } else {
      for (double v : rec.alphas) out << ',' << format_shortest(v);
    }
    out << ',' << format_shortest(rec.z);
    out << ',' << (rec.decrement ? format_shortest(*rec.decrement) : "");
    out << ',' << (rec.nl8_bound ? format_shortest(*rec.nl8_bound) : "");
    out << ',';
    for (std::size_t k = 0; k < rec.merges.size(); ++k) {
      if (k) out << ';';
      out << rec.merges[k].first + 1 << '-' << rec.merges[k].second + 1;
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path);
}

namespace {

[[noreturn]] void fail_line(const std::string& path, std::size_t lineno, const std::string& why) {
  throw ConfigError(path + ":" + std::to_string(lineno) + ": " + why);
}

long require_int(const ordered_json& j, const char* key, const std::string& path,
                 std::size_t lineno) {
  if (!j.contains(key) || !j[key].is_number_integer())
    fail_line(path, lineno, std::string("missing or non-integer field '") + key + "'");
  return j[key].get<long>();
}

double require_double(const ordered_json& j, const char* key, const std::string& path,
                      std::size_t lineno) {
  if (!j.contains(key) || !j[key].is_number())
    fail_line(path, lineno, std::string("missing or non-numeric field '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);

  Trajectory traj;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail_line(path, lineno, std::string("not valid JSON: ") + e.what());
    }

    const long t = require_int(j, "t", path, lineno);
    if (t != static_cast<long>(traj.steps.size()))
      fail_line(path, lineno,
                "steps must be contiguous: expected t = " +
                    std::to_string(traj.steps.size()) + ", got " + std::to_string(t));

    if (traj.steps.empty()) {
      if (!j.contains("format") || j["format"] != kFormatTag)
        fail_line(path, lineno, std::string("first line must carry format '") + kFormatTag + "'");
      traj.n = static_cast<int>(require_int(j, "n", path, lineno));
      traj.d = static_cast<int>(require_int(j, "d", path, lineno));
      traj.epsilon = require_double(j, "epsilon", path, lineno);
      traj.delta = require_double(j, "delta", path, lineno);
      if (!j.contains("master_seed") || !j["master_seed"].is_number())
        fail_line(path, lineno, "missing field 'master_seed'");
      traj.master_seed = j["master_seed"].get<std::uint64_t>();
      if (!j.contains("schedule") || !j["schedule"].is_string())
        fail_line(path, lineno, "missing field 'schedule'");
      traj.schedule_kind =
          kind_from_string(j["schedule"].get<std::string>(), path + ":" + std::to_string(lineno));
      if (j.contains("steady_from")) traj.steady_from = j["steady_from"].get<long>();
      if (traj.n < 1 || traj.d < 1) fail_line(path, lineno, "need n >= 1 and d >= 1");
    }

    StepRecord rec;
    rec.t = t;
    if (!j.contains("x") || !j["x"].is_array() ||
        j["x"].size() != static_cast<std::size_t>(traj.n))
      fail_line(path, lineno, "field 'x' must be an array of n opinion points");
    for (const auto& point : j["x"]) {
      if (!point.is_array() || point.size() != static_cast<std::size_t>(traj.d))
        fail_line(path, lineno, "each opinion must have d coordinates");
      for (const auto& v : point) {
        if (!v.is_number()) fail_line(path, lineno, "coordinates must be numbers");
        rec.coords.push_back(v.get<double>());
      }
    }

    if (j.contains("alpha")) {
      if (!j["alpha"].is_array() || j["alpha"].size() != static_cast<std::size_t>(traj.n))
        fail_line(path, lineno, "field 'alpha' must hold n values");
      for (const auto& v : j["alpha"]) rec.alphas.push_back(v.get<double>());
      std::vector<int> expected_open;
      for (int i = 0; i < traj.n; ++i) {
        const double a = rec.alphas[i];
        if (!(a >= 0.0) || !(a <= 1.0))
          fail_line(path, lineno, "alpha_" + std::to_string(i + 1) + " outside [0, 1]");
        if (a < 1.0) expected_open.push_back(i);
      }
      if (!j.contains("open") || !j["open"].is_array())
        fail_line(path, lineno, "records with 'alpha' must carry 'open'");
      for (const auto& v : j["open"]) {
        const long id = v.get<long>();
        if (id < 1 || id > traj.n)
          fail_line(path, lineno, "agent id " + std::to_string(id) + " out of range [1, " +
                                      std::to_string(traj.n) + "]");
        rec.open_set.push_back(static_cast<int>(id - 1));
      }
      if (rec.open_set != expected_open)
        fail_line(path, lineno, "'open' disagrees with the alphas below 1");
      if (!j.contains("decrement") || !j.contains("nl8_bound"))
        fail_line(path, lineno, "records with 'alpha' must carry 'decrement' and 'nl8_bound'");
    } else if (j.contains("open") || j.contains("decrement") || j.contains("nl8_bound")) {
      fail_line(path, lineno, "final record must not carry 'open', 'decrement', or 'nl8_bound'");
    }

    rec.edge_count = static_cast<int>(require_int(j, "edges", path, lineno));
    rec.component_count = static_cast<int>(require_int(j, "components", path, lineno));
    rec.z = require_double(j, "z", path, lineno);
    if (j.contains("decrement")) rec.decrement = j["decrement"].get<double>();
    if (j.contains("nl8_bound")) rec.nl8_bound = j["nl8_bound"].get<double>();
    if (j.contains("merges")) {
      if (!j["merges"].is_array()) fail_line(path, lineno, "'merges' must be an array of pairs");
      for (const auto& pr : j["merges"]) {
        if (!pr.is_array() || pr.size() != 2)
          fail_line(path, lineno, "'merges' must be an array of pairs");
        const long a = pr[0].get<long>();
        const long b = pr[1].get<long>();
        if (a < 1 || b < 1 || a > traj.n || b > traj.n || a >= b)
          fail_line(path, lineno, "merge pair must be 1-based agent ids with first < second");
        rec.merges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
      }
    }
    traj.steps.push_back(std::move(rec));
  }
  if (traj.steps.empty()) throw ConfigError(path + ": no trajectory records");
  for (std::size_t idx = 0; idx + 1 < traj.steps.size(); ++idx)
    if (traj.steps[idx].alphas.empty())
      throw ConfigError(path + ": record t = " + std::to_string(traj.steps[idx].t) +
                        " lacks an assignment but is not the final record");
  if (!traj.steps.back().alphas.empty())
    throw ConfigError(path + ": final record must not carry an assignment");
  return traj;
}

namespace {

ordered_json optional_long(const std::optional<long>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string stopping_report_text(const StoppingReport& r) {
  ordered_json j;
  j["epsilon"] = r.epsilon;
  j["delta"] = r.delta;
  j["horizon"] = r.horizon;
  j["tau_delta"] = optional_long(r.tau_delta);
  ordered_json tau_hat;
  for (int m = r.m_min; m <= r.m_max; ++m)
    tau_hat[std::to_string(m)] = optional_long(r.tau_hat_at(m));
  j["tau_hat"] = std::move(tau_hat);
  ordered_json merges = ordered_json::array();
  for (const auto& [t, pr] : r.merge_times)
    merges.push_back({{"t", t}, {"pair", ordered_json::array({pr.first + 1, pr.second + 1})}});
  j["merges"] = std::move(merges);
  if (r.freeze_m) {
    j["freeze"] = {{"m", *r.freeze_m}, {"from", *r.freeze_from}};
  } else {
    j["freeze"] = nullptr;
  }
  j["last_edge_change"] = r.last_edge_change;
  j["last_state_change"] = r.last_state_change;
  j["termination"] = {{"time", optional_long(r.termination_time)},
                      {"certified_from", optional_long(r.certified_steady_from)}};
  j["equivalences"] = {{"checked", r.equivalences_checked},
                       {"violations", r.equivalence_violations.size()}};
  ordered_json windows = ordered_json::array();
  for (const AWindow& w : r.a_windows) {
    windows.push_back({{"m", w.m},
                       {"start", optional_long(w.start)},
                       {"end", optional_long(w.end)},
                       {"nontrivial_steps", w.nontrivial_steps},
                       {"first_nontrivial", optional_long(w.first_nontrivial)}});
  }
  j["windows"] = std::move(windows);
  j["nontrivial_onsets"] = r.a_set;
  return j.dump(2);
}

std::string ensemble_report_text(const EnsembleResult& r) {
  ordered_json j;
  j["runs"] = r.runs;
  j["horizon"] = r.horizon;
  j["n"] = r.n;
  j["epsilon"] = r.epsilon;
  j["delta"] = r.delta;
  j["gamma"] = r.gamma;
  j["min_partition_prob"] = r.min_partition_prob;
  j["reached"] = r.reached;
  j["reached_fraction"] = r.reached_fraction;
  j["mean_tau"] = r.mean_tau ? ordered_json(*r.mean_tau) : ordered_json(nullptr);
  j["stderr_tau"] = r.stderr_tau ? ordered_json(*r.stderr_tau) : ordered_json(nullptr);
  j["expected_tau_bound"] = r.bound;
  j["expected_window_bound"] = r.window_bound;
  j["mean_to_bound_ratio"] =
      r.mean_tau ? ordered_json(*r.mean_tau / r.bound) : ordered_json(nullptr);
  j["flagged_unreached"] = r.flagged_unreached;
  j["total_steps"] = r.total_steps;
  return j.dump(2);
}

void write_ensemble_csv(const EnsembleResult& r, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "run,tau_delta,stop_t,certified_stuck\n";
  for (const RunOutcome& o : r.outcomes) {
    out << o.run_index << ',';
    if (o.tau_delta) out << *o.tau_delta;
    out << ',' << o.stop_t << ',' << (o.certified_stuck ? 1 : 0) << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_for_write(path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string format_shortest(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace mhk
