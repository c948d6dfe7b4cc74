#include "cablesim/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "json.hpp"

namespace cablesim {

namespace {

void detect_window(SweepResult& result) {
  int best_len = 0, best_start = -1;
  int run_start = -1;
  const int n = static_cast<int>(result.rows.size());
  for (int i = 0; i <= n; ++i) {
    const bool full = i < n && result.rows[i].trials > 0 &&
                      result.rows[i].successes == result.rows[i].trials;
    if (full && run_start < 0) run_start = i;
    if (!full && run_start >= 0) {
      const int len = i - run_start;
      if (len > best_len) {
        best_len = len;
        best_start = run_start;
      }
      run_start = -1;
    }
  }
  if (best_start < 0) return;
  result.has_window = true;
  result.window_lo = result.rows[best_start].offset;
  result.window_hi = result.rows[best_start + best_len - 1].offset;
  result.window_width = (best_len - 1) * result.step;
  result.window_center = 0.5 * (result.window_lo + result.window_hi);
}

}  // namespace

SweepResult run_sweep(const ScenarioConfig& config, const SweepSpec& spec) {
  SweepResult result;
  result.step = spec.step;
  const int count = spec.offset_count();
  for (int oi = 0; oi < count; ++oi) {
    OffsetRow row;
    row.offset = spec.offset_at(oi);
    row.trials = spec.trials;
    const Vec2 goal = spec.axis == 'x' ? Vec2(row.offset, 0.0) : Vec2(0.0, row.offset);
    for (int trial = 0; trial < spec.trials; ++trial) {
      PipelineExecutor exec = config.make_executor(goal);
      const std::uint64_t seed = derive_seed(spec.seed_base, static_cast<std::uint64_t>(oi),
                                             static_cast<std::uint64_t>(trial));
      RunOptions opts;
      opts.stop_after_first_insertion = true;
      const AssemblyReport report = exec.run(config.pipeline, seed, opts);
      if (report.total_success) ++row.successes;
    }
    result.rows.push_back(row);
  }
  detect_window(result);
  return result;
}

BatchResult run_batch(const ScenarioConfig& config, int n, std::uint64_t seed, bool keep_reports) {
  BatchResult batch;
  batch.runs = n;
  std::map<std::string, double> phase_total;
  for (int i = 0; i < n; ++i) {
    PipelineExecutor exec = config.make_executor();
    AssemblyReport report =
        exec.run(config.pipeline, derive_seed(seed, static_cast<std::uint64_t>(i), 0));
    if (report.total_success)
      ++batch.successes;
    else if (report.failure)
      ++batch.failure_histogram[to_string(*report.failure)];
    for (const auto& row : phase_durations(report)) {
      if (!row.ran) continue;
      phase_total[row.phase] += row.seconds;
      ++batch.phase_ran_count[row.phase];
    }
    batch.mean_duration_s += report.total_duration_s();
    if (keep_reports) batch.reports.push_back(std::move(report));
  }
  if (n > 0) batch.mean_duration_s /= n;
  for (const auto& [phase, total] : phase_total)
    batch.mean_phase_durations_s[phase] = total / batch.phase_ran_count[phase];
  return batch;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "offset_mm,successes,trials,rate\n";
  for (const auto& row : sweep.rows) {
    out += format_double(row.offset) + "," + std::to_string(row.successes) + "," +
           std::to_string(row.trials) + "," + format_double(row.rate()) + "\n";
  }
  return out;
}

namespace {

struct PlotRow {
  double offset;
  double rate;
};

// The SVG reads its numbers back out of the CSV text so both carry exactly
// the same data.
std::vector<PlotRow> rows_from_csv(const std::string& csv) {
  std::vector<PlotRow> rows;
  std::size_t pos = csv.find('\n');  // skip header
  while (pos != std::string::npos && pos + 1 < csv.size()) {
    const std::size_t end = csv.find('\n', pos + 1);
    const std::string line = csv.substr(pos + 1, end - pos - 1);
    if (!line.empty()) {
      PlotRow row{};
      const char* p = line.c_str();
      char* next = nullptr;
      row.offset = std::strtod(p, &next);
      for (int comma = 0; comma < 3 && next != nullptr && *next == ','; ++comma)
        row.rate = std::strtod(next + 1, &next);
      rows.push_back(row);
    }
    pos = end;
  }
  return rows;
}

}  // namespace

void emit_plot(const SweepResult& sweep, const std::string& svg_path) {
  const std::string csv = sweep_csv(sweep);
  std::string csv_path = svg_path;
  if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".svg")
    csv_path = csv_path.substr(0, csv_path.size() - 4);
  csv_path += ".csv";
  write_text_file(csv_path, csv);

  const auto rows = rows_from_csv(csv);
  const double width = 640.0, height = 400.0;
  const double ml = 60.0, mr = 20.0, mt = 40.0, mb = 50.0;
  double xmin = 0.0, xmax = 1.0;
  if (!rows.empty()) {
    xmin = rows.front().offset;
    xmax = rows.back().offset;
    if (xmax <= xmin) xmax = xmin + 1.0;
  }
  auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto sy = [&](double rate) { return height - mb - rate * (height - mt - mb); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(width) +
         "\" height=\"" + format_double(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(height - mb) + "\" x2=\"" +
         format_double(width - mr) + "\" y2=\"" + format_double(height - mb) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt) + "\" x2=\"" +
         format_double(ml) + "\" y2=\"" + format_double(height - mb) + "\" stroke=\"black\"/>\n";

  if (sweep.has_window) {
    svg += "<rect x=\"" + format_double(sx(sweep.window_lo)) + "\" y=\"" + format_double(mt) +
           "\" width=\"" + format_double(sx(sweep.window_hi) - sx(sweep.window_lo)) +
           "\" height=\"" + format_double(height - mt - mb) +
           "\" fill=\"#cde8cd\" stroke=\"none\"/>\n";
  }

  // Step plot: hold each rate across its grid cell.
  if (!rows.empty()) {
    const double half = 0.5 * sweep.step;
    std::string pts;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      pts += format_double(sx(rows[i].offset - half)) + "," + format_double(sy(rows[i].rate)) + " ";
      pts += format_double(sx(rows[i].offset + half)) + "," + format_double(sy(rows[i].rate)) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"#1a4f8b\" stroke-width=\"2\" points=\"" + pts +
           "\"/>\n";
  }

  svg += "<text x=\"" + format_double(0.5 * width) + "\" y=\"" + format_double(height - 12.0) +
         "\" text-anchor=\"middle\" font-size=\"14\">offset (mm)</text>\n";
  svg += "<text x=\"16\" y=\"" + format_double(0.5 * height) +
         "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 " +
         format_double(0.5 * height) + ")\">success rate</text>\n";
  if (sweep.has_window) {
    svg += "<text x=\"" + format_double(0.5 * width) + "\" y=\"" + format_double(mt - 14.0) +
           "\" text-anchor=\"middle\" font-size=\"14\">100% window: " +
           format_double(sweep.window_width) + " mm [" + format_double(sweep.window_lo) + ", " +
           format_double(sweep.window_hi) + "]</text>\n";
  } else {
    svg += "<text x=\"" + format_double(0.5 * width) + "\" y=\"" + format_double(mt - 14.0) +
           "\" text-anchor=\"middle\" font-size=\"14\">no 100% window</text>\n";
  }
  svg += "</svg>\n";
  write_text_file(svg_path, svg);
}

std::string linkage_table(double L, double a_min, double a_max, int steps) {
  if (!(L > 0.0) || !(a_min > 0.0) || !(a_max < 2.0 * L) || !(a_min <= a_max) || steps < 1)
    throw std::domain_error("linkage table range must satisfy 0 < a_min <= a_max < 2L, steps >= 1");
  std::string out = "a_mm,y_mm,force_ratio\n";
  for (int i = 0; i < steps; ++i) {
    const double a =
        steps == 1 ? a_min : a_min + (a_max - a_min) * static_cast<double>(i) / (steps - 1);
    out += format_double(a) + "," + format_double(sr_output_height(L, a)) + "," +
           format_double(sr_force_ratio(L, a)) + "\n";
  }
  return out;
}

namespace {

nlohmann::ordered_json report_json(const AssemblyReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = report.seed;
  j["scene_hash"] = report.scene_hash;
  j["success"] = report.total_success;
  j["failure_cause"] =
      report.failure ? nlohmann::ordered_json(to_string(*report.failure)) : nlohmann::ordered_json();
  j["waypoint_count"] = report.waypoint_count;
  j["total_duration_s"] = report.total_duration_s();

  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : report.steps) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    js["phase"] = s.phase;
    js["outcome"] = s.outcome == StepOutcome::Success
                        ? "success"
                        : (s.outcome == StepOutcome::Failure ? "failure" : "skipped-infeasible");
    js["cause"] = s.cause ? nlohmann::ordered_json(to_string(*s.cause)) : nlohmann::ordered_json();
    js["duration_s"] = s.duration_s;
    steps.push_back(js);
  }
  j["steps"] = steps;

  nlohmann::ordered_json durations;
  for (const auto& row : phase_durations(report))
    durations[row.phase] = row.ran ? nlohmann::ordered_json(row.seconds) : nlohmann::ordered_json();
  j["durations"] = durations;

  auto trace = nlohmann::ordered_json::array();
  for (const auto& e : report.trace) {
    nlohmann::ordered_json je;
    je["t"] = e.t;
    je["kind"] = e.kind;
    je["detail"] = e.detail;
    trace.push_back(je);
  }
  j["trace"] = trace;
  return j;
}

}  // namespace

std::string report_to_json(const AssemblyReport& report) { return report_json(report).dump(2) + "\n"; }

std::string batch_to_json(const BatchResult& batch, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = seed;
  j["runs"] = batch.runs;
  j["successes"] = batch.successes;
  j["success_rate"] = batch.runs > 0 ? static_cast<double>(batch.successes) / batch.runs : 0.0;
  j["failure_histogram"] = batch.failure_histogram;
  nlohmann::ordered_json means;
  for (const auto& [phase, mean] : batch.mean_phase_durations_s) means[phase] = mean;
  j["mean_phase_durations_s"] = means;
  j["mean_duration_s"] = batch.mean_duration_s;
  return j.dump(2) + "\n";
}

std::string sweep_to_json(const SweepResult& sweep, std::uint64_t seed_base) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["seed_base"] = seed_base;
  j["step_mm"] = sweep.step;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : sweep.rows) {
    nlohmann::ordered_json jr;
    jr["offset_mm"] = row.offset;
    jr["successes"] = row.successes;
    jr["trials"] = row.trials;
    jr["rate"] = row.rate();
    rows.push_back(jr);
  }
  j["rows"] = rows;
  j["window"] = nlohmann::ordered_json();
  if (sweep.has_window) {
    nlohmann::ordered_json w;
    w["width_mm"] = sweep.window_width;
    w["center_mm"] = sweep.window_center;
    w["lo_mm"] = sweep.window_lo;
    w["hi_mm"] = sweep.window_hi;
    j["window"] = w;
  }
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

}  // namespace cablesim
