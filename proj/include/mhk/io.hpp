#pragma once

#include <string>

#include "mhk/monte_carlo.hpp"
#include "mhk/stopping.hpp"
#include "mhk/trajectory.hpp"

namespace mhk {

// Trajectory files are JSON lines, one step per line, t ascending from 0.
// The t=0 line additionally carries the header fields (format tag, n, d,
// epsilon, delta, master_seed, schedule, and steady_from when certified), so
// a run over two transitions is exactly three lines.  Agent ids in files are
// 1-based; doubles are serialized in shortest round-trip form, so reloading
// reproduces every stored value bit-for-bit.
void export_trajectory_jsonl(const Trajectory& traj, const std::string& path);

// Flattened export for spreadsheets: columns t, x_<agent>_<coord>...,
// alpha_<agent>..., Z, decrement, nl8_bound, merges.  Absent values are
// empty cells; merges render as "1-2;3-4".  Export only; analyze reads the
// JSONL form.
void export_trajectory_csv(const Trajectory& traj, const std::string& path);

// Reads a JSONL trajectory back, validating structure, step contiguity, and
// the open-set / alpha consistency of every record.
Trajectory load_trajectory(const std::string& path);

// Human- and machine-readable summaries (JSON text, two-space indent).
std::string stopping_report_text(const StoppingReport& r);
std::string ensemble_report_text(const EnsembleResult& r);

// Per-run ensemble table: run, tau_delta, stop_t, certified_stuck.
void write_ensemble_csv(const EnsembleResult& r, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

// Shortest decimal form that parses back to the same double (the form every
// export uses).
std::string format_shortest(double v);

}  // namespace mhk
