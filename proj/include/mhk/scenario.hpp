#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mhk/dynamics.hpp"
#include "mhk/schedule.hpp"

namespace mhk {

// Initial opinions drawn uniformly from [low, high]^d, seeded independently
// of the schedule.  Each ensemble run index gets its own derived draw
// sequence, so run r is reproducible in isolation.
struct UniformBoxSpec {
  double low = 0.0;
  double high = 1.0;
  std::uint64_t seed = 0;
};

struct OutputFlags {
  bool trajectory = true;
  bool stopping = true;
  std::string format = "jsonl";  // "jsonl", "csv", or "both"
};

struct ScenarioConfig {
  int n = 0;
  int d = 1;
  double epsilon = 0.0;
  double delta = 0.0;  // stopping-time target
  long horizon = 0;
  std::uint64_t master_seed = 0;
  std::variant<std::vector<double>, UniformBoxSpec> initial;  // explicit flat coords, or generator
  ScheduleSpec schedule;
  OutputFlags outputs;

  void validate() const;  // throws ConfigError with a field path
  bool has_explicit_initial() const { return std::holds_alternative<std::vector<double>>(initial); }
};

// Parse and validate a scenario from JSON text.  `origin` names the source
// (file path) for error messages.  Agent indices in files are 1-based; the
// in-memory representation is 0-based.
ScenarioConfig parse_scenario_json(const std::string& text, const std::string& origin);

// Read the file and parse it.
ScenarioConfig load_scenario(const std::string& path);

// The opinion profile a given ensemble run starts from.  Explicit opinion
// lists are shared by every run; the uniform-box generator derives a fresh
// sample per run index.
OpinionState materialize_initial(const ScenarioConfig& sc, std::uint64_t run_index);

// Schedule draw stream for one ensemble run.
RngStream schedule_stream(const ScenarioConfig& sc, std::uint64_t run_index);

}  // namespace mhk
