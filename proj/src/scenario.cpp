#include "mhk/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mhk/errors.hpp"

namespace mhk {

void ScenarioConfig::validate() const {
  if (n < 1) throw ConfigError("n: must be >= 1");
  if (d < 1) throw ConfigError("d: must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon: must be > 0");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta: must be > 0");
  if (horizon < 1) throw ConfigError("horizon: must be >= 1");
  if (has_explicit_initial()) {
    const auto& coords = std::get<std::vector<double>>(initial);
    if (coords.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d))
      throw ConfigError("initial_opinions: expected " + std::to_string(static_cast<long>(n) * d) +
                        " coordinates, got " + std::to_string(coords.size()));
    for (double v : coords)
      if (!std::isfinite(v)) throw ConfigError("initial_opinions: coordinates must be finite");
  } else {
    const auto& box = std::get<UniformBoxSpec>(initial);
    if (!(box.low <= box.high) || !std::isfinite(box.low) || !std::isfinite(box.high))
      throw ConfigError("initial_opinions.low/high: need finite low <= high");
  }
  schedule.validate(n);
  if (schedule.kind == ScheduleKind::Scripted &&
      static_cast<long>(schedule.scripted.size()) < horizon)
    throw ConfigError("schedule.scripted: " + std::to_string(schedule.scripted.size()) +
                      " rows cover fewer steps than horizon " + std::to_string(horizon));
  if (outputs.format != "jsonl" && outputs.format != "csv" && outputs.format != "both")
    throw ConfigError("outputs.format: must be jsonl, csv, or both");
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& reason) {
  throw ConfigError(origin + ": " + path + ": " + reason);
}

const json& need(const json& obj, const char* key, const std::string& origin,
                 const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(origin, path + key, "missing required field");
  return *it;
}

double need_number(const json& obj, const char* key, const std::string& origin,
                   const std::string& path) {
  const json& v = need(obj, key, origin, path);
  if (!v.is_number()) fail(origin, path + key, "expected a number");
  return v.get<double>();
}

long need_integer(const json& obj, const char* key, const std::string& origin,
                  const std::string& path) {
  const json& v = need(obj, key, origin, path);
  if (!v.is_number_integer()) fail(origin, path + key, "expected an integer");
  return v.get<long>();
}

ScheduleSpec parse_schedule(const json& js, int n, const std::string& origin) {
  const std::string path = "schedule.";
  ScheduleSpec spec;
  const json& kind = need(js, "kind", origin, path);
  if (!kind.is_string()) fail(origin, path + "kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "synchronous") {
    spec.kind = ScheduleKind::Synchronous;
  } else if (k == "asynchronous") {
    spec.kind = ScheduleKind::Asynchronous;
  } else if (k == "scripted") {
    spec.kind = ScheduleKind::Scripted;
    const json& rows = need(js, "alphas", origin, path);
    if (!rows.is_array() || rows.empty())
      fail(origin, path + "alphas", "expected a nonempty array of per-step alpha rows");
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const json& row = rows[t];
      const std::string rp = path + "alphas[" + std::to_string(t) + "]";
      if (!row.is_array()) fail(origin, rp, "expected an array");
      std::vector<double> alphas;
      for (const auto& v : row) {
        if (!v.is_number()) fail(origin, rp, "alphas must be numbers");
        alphas.push_back(v.get<double>());
      }
      spec.scripted.push_back(std::move(alphas));
    }
  } else if (k == "stochastic_support") {
    spec.kind = ScheduleKind::StochasticSupport;
    const json& sup = need(js, "support", origin, path);
    if (!sup.is_array() || sup.empty())
      fail(origin, path + "support", "expected a nonempty array");
    for (std::size_t e = 0; e < sup.size(); ++e) {
      const std::string ep = path + "support[" + std::to_string(e) + "].";
      if (!sup[e].is_object()) fail(origin, ep, "expected an object");
      SupportElement el;
      const json& members = need(sup[e], "members", origin, ep);
      if (!members.is_array()) fail(origin, ep + "members", "expected an array of agent ids");
      for (const auto& m : members) {
        if (!m.is_number_integer()) fail(origin, ep + "members", "agent ids must be integers");
        long id = m.get<long>();  // 1-based in files
        if (id < 1 || id > n)
          fail(origin, ep + "members",
               "agent id " + std::to_string(id) + " out of range [1, " + std::to_string(n) + "]");
        el.members.push_back(static_cast<int>(id - 1));
      }
      el.probability = need_number(sup[e], "probability", origin, ep);
      spec.support.push_back(std::move(el));
    }
    const json& part = need(js, "partition_indices", origin, path);
    if (!part.is_array()) fail(origin, path + "partition_indices", "expected an array");
    for (const auto& v : part) {
      if (!v.is_number_integer())
        fail(origin, path + "partition_indices", "indices must be integers");
      const long idx = v.get<long>();  // 1-based in files, like agent ids
      if (idx < 1 || idx > static_cast<long>(spec.support.size()))
        fail(origin, path + "partition_indices",
             "index " + std::to_string(idx) + " out of range [1, " +
                 std::to_string(spec.support.size()) + "]");
      spec.partition_indices.push_back(static_cast<int>(idx - 1));
    }
    if (auto it = js.find("open_alpha"); it != js.end()) {
      const json& oa = *it;
      if (oa.contains("constant")) {
        double c = oa["constant"].get<double>();
        spec.open_alpha = OpenAlphaPolicy{c, c};
      } else if (oa.contains("interval")) {
        const json& iv = oa["interval"];
        if (!iv.is_array() || iv.size() != 2)
          fail(origin, path + "open_alpha.interval", "expected [lo, hi]");
        spec.open_alpha = OpenAlphaPolicy{iv[0].get<double>(), iv[1].get<double>()};
      } else {
        fail(origin, path + "open_alpha", "expected {\"constant\": c} or {\"interval\": [lo, hi]}");
      }
    }
  } else {
    fail(origin, path + "kind",
         "unknown kind \"" + k +
             "\" (expected synchronous, asynchronous, scripted, or stochastic_support)");
  }
  return spec;
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text, const std::string& origin) {
  json js;
  try {
    js = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": not valid JSON: " + e.what());
  }
  if (!js.is_object()) throw ConfigError(origin + ": top level must be an object");

  ScenarioConfig sc;
  sc.n = static_cast<int>(need_integer(js, "n", origin, ""));
  sc.d = js.contains("d") ? static_cast<int>(need_integer(js, "d", origin, "")) : 1;
  sc.epsilon = need_number(js, "epsilon", origin, "");
  sc.delta = need_number(js, "delta", origin, "");
  sc.horizon = need_integer(js, "horizon", origin, "");
  if (js.contains("master_seed")) {
    const json& seed = js["master_seed"];
    if (!seed.is_number_integer()) fail(origin, "master_seed", "expected an integer");
    sc.master_seed = seed.get<std::uint64_t>();
  }

  const json& init = need(js, "initial_opinions", origin, "");
  if (init.is_array()) {
    std::vector<double> coords;
    for (std::size_t i = 0; i < init.size(); ++i) {
      const json& row = init[i];
      const std::string rp = "initial_opinions[" + std::to_string(i) + "]";
      if (!row.is_array() || row.size() != static_cast<std::size_t>(sc.d))
        fail(origin, rp, "expected an array of " + std::to_string(sc.d) + " coordinates");
      for (const auto& v : row) {
        if (!v.is_number()) fail(origin, rp, "coordinates must be numbers");
        coords.push_back(v.get<double>());
      }
    }
    sc.initial = std::move(coords);
  } else if (init.is_object()) {
    const json& gen = need(init, "generator", origin, "initial_opinions.");
    if (!gen.is_string() || gen.get<std::string>() != "uniform_box")
      fail(origin, "initial_opinions.generator", "only \"uniform_box\" is supported");
    UniformBoxSpec box;
    box.low = need_number(init, "low", origin, "initial_opinions.");
    box.high = need_number(init, "high", origin, "initial_opinions.");
    if (init.contains("seed")) box.seed = init["seed"].get<std::uint64_t>();
    sc.initial = box;
  } else {
    fail(origin, "initial_opinions", "expected an array of points or a generator object");
  }

  sc.schedule = parse_schedule(need(js, "schedule", origin, ""), sc.n, origin);

  if (auto it = js.find("outputs"); it != js.end()) {
    const json& out = *it;
    if (!out.is_object()) fail(origin, "outputs", "expected an object");
    if (out.contains("trajectory")) sc.outputs.trajectory = out["trajectory"].get<bool>();
    if (out.contains("stopping")) sc.outputs.stopping = out["stopping"].get<bool>();
    if (out.contains("format")) sc.outputs.format = out["format"].get<std::string>();
  }

  try {
    sc.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return sc;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str(), path);
}

OpinionState materialize_initial(const ScenarioConfig& sc, std::uint64_t run_index) {
  if (sc.has_explicit_initial())
    return OpinionState(0, sc.n, sc.d, sc.epsilon, std::get<std::vector<double>>(sc.initial));
  const auto& box = std::get<UniformBoxSpec>(sc.initial);
  auto draws = RngStream(box.seed).derive(kInitialLane).derive(run_index).at(0);
  std::vector<double> coords(static_cast<std::size_t>(sc.n) * sc.d);
  for (auto& v : coords) v = box.low + draws.next_unit() * (box.high - box.low);
  return OpinionState(0, sc.n, sc.d, sc.epsilon, std::move(coords));
}

RngStream schedule_stream(const ScenarioConfig& sc, std::uint64_t run_index) {
  return RngStream(sc.master_seed).derive(kScheduleLane).derive(run_index);
}

}  // namespace mhk
