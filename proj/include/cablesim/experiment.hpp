#pragma once

#include <map>
#include <string>
#include <vector>

#include "cablesim/scenario.hpp"

namespace cablesim {

struct OffsetRow {
  double offset = 0.0;  // mm
  int successes = 0;
  int trials = 0;

  double rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

struct SweepResult {
  std::vector<OffsetRow> rows;
  double step = 0.25;
  // Widest contiguous run of rate == 1.0: width = (run length - 1) * step.
  bool has_window = false;
  double window_width = 0.0;
  double window_center = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Offset-sweep protocol: inject a constant offset into the insertion taught
// goal and repeat the magazine-grasp-to-insertion cycle `trials` times per
// offset with derived seeds.
SweepResult run_sweep(const ScenarioConfig& config, const SweepSpec& spec);

struct BatchResult {
  int runs = 0;
  int successes = 0;
  std::map<std::string, int> failure_histogram;           // by cause
  std::map<std::string, double> mean_phase_durations_s;   // phases that ran
  std::map<std::string, int> phase_ran_count;
  double mean_duration_s = 0.0;
  std::vector<AssemblyReport> reports;
};

BatchResult run_batch(const ScenarioConfig& config, int n, std::uint64_t seed,
                      bool keep_reports = false);

// Step plot of the sweep with the 100% window annotated; writes a sibling
// .csv holding the identical numeric data the SVG is generated from.
void emit_plot(const SweepResult& sweep, const std::string& svg_path);

std::string sweep_csv(const SweepResult& sweep);

// Rows (a, y, force_ratio) for the linkage design table.
std::string linkage_table(double L, double a_min, double a_max, int steps);

// Report serialization (schema_version 1): steps[], durations{} (null for a
// phase that did not run), trace[], seed, scene_hash.
std::string report_to_json(const AssemblyReport& report);
std::string batch_to_json(const BatchResult& batch, std::uint64_t seed);
std::string sweep_to_json(const SweepResult& sweep, std::uint64_t seed_base);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cablesim
