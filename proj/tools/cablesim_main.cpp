#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cablesim/experiment.hpp"

namespace fs = std::filesystem;
using namespace cablesim;

namespace {

void print_phase_table(const AssemblyReport& report) {
  std::printf("%-22s %10s\n", "phase", "seconds");
  for (const auto& row : phase_durations(report)) {
    if (row.ran)
      std::printf("%-22s %10.2f\n", row.phase.c_str(), row.seconds);
    else
      std::printf("%-22s %10s\n", row.phase.c_str(), "-");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale cable assembly simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  bool trace = false;
  app.add_option("--scenario", scenario_path, "Scenario file (TOML)")->required();
  app.add_option("--seed", seed, "Base random seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--trace", trace, "Dump per-solve cable node CSVs");

  auto* cmd_run = app.add_subcommand("run", "Run the scenario pipeline once");
  auto* cmd_sweep = app.add_subcommand("sweep", "Offset sweep of the insertion goal");
  auto* cmd_batch = app.add_subcommand("batch", "Repeated seeded pipeline runs");
  auto* cmd_linkage = app.add_subcommand("linkage", "Scott-Russell linkage table");
  auto* cmd_validate = app.add_subcommand("validate", "Validate the scenario file");

  int batch_n = 20;
  cmd_batch->add_option("--n", batch_n, "Number of runs");

  double link_L = 40.0, link_min = 10.0, link_max = 70.0;
  int link_steps = 25;
  cmd_linkage->add_option("--length", link_L, "Short beam length L (mm)");
  cmd_linkage->add_option("--min", link_min, "Smallest input a (mm)");
  cmd_linkage->add_option("--max", link_max, "Largest input a (mm)");
  cmd_linkage->add_option("--steps", link_steps, "Row count");

  CLI11_PARSE(app, argc, argv);

  LoadResult loaded = load_scenario(scenario_path);
  if (!loaded.config) {
    std::fprintf(stderr, "scenario validation failed:\n");
    for (const auto& e : loaded.errors) std::fprintf(stderr, "  %s\n", e.c_str());
    return 2;
  }
  ScenarioConfig config = std::move(*loaded.config);

  if (cmd_validate->parsed()) {
    std::printf("OK: %s (scene %s, %zu steps)\n", config.name.c_str(),
                config.scene_hash.c_str(), config.pipeline.size());
    return 0;
  }

  fs::create_directories(out_dir);
  if (trace) {
    config.exec.trace_dir = out_dir;
    fs::create_directories(out_dir + "/solve_traces");
  }

  try {
    if (cmd_run->parsed()) {
      PipelineExecutor exec = config.make_executor();
      AssemblyReport report = exec.run(config.pipeline, seed);
      write_text_file(out_dir + "/report.json", report_to_json(report));
      std::printf("%s: %s (%.2f s simulated)\n", config.name.c_str(),
                  report.total_success ? "success" : "FAILURE", report.total_duration_s());
      if (report.failure) std::printf("failure cause: %s\n", to_string(*report.failure));
      print_phase_table(report);
      std::printf("report: %s/report.json\n", out_dir.c_str());
      return report.total_success ? 0 : 1;
    }

    if (cmd_sweep->parsed()) {
      SweepSpec spec = config.sweep;
      spec.seed_base = seed;
      const SweepResult sweep = run_sweep(config, spec);
      emit_plot(sweep, out_dir + "/sweep.svg");
      write_text_file(out_dir + "/sweep.json", sweep_to_json(sweep, seed));
      for (const auto& row : sweep.rows)
        std::printf("offset %+6.2f mm: %d/%d\n", row.offset, row.successes, row.trials);
      if (sweep.has_window)
        std::printf("100%% window: %.2f mm, center %+0.3f mm [%+0.2f, %+0.2f]\n",
                    sweep.window_width, sweep.window_center, sweep.window_lo, sweep.window_hi);
      else
        std::printf("no 100%% window found\n");
      std::printf("outputs: %s/sweep.csv, %s/sweep.svg, %s/sweep.json\n", out_dir.c_str(),
                  out_dir.c_str(), out_dir.c_str());
      return 0;
    }

    if (cmd_batch->parsed()) {
      const BatchResult batch = run_batch(config, batch_n, seed);
      write_text_file(out_dir + "/batch.json", batch_to_json(batch, seed));
      std::printf("%d/%d runs succeeded\n", batch.successes, batch.runs);
      for (const auto& [cause, count] : batch.failure_histogram)
        std::printf("  %-24s %d\n", cause.c_str(), count);
      for (const auto& [phase, mean] : batch.mean_phase_durations_s)
        std::printf("mean %-22s %8.2f s\n", phase.c_str(), mean);
      std::printf("report: %s/batch.json\n", out_dir.c_str());
      return 0;
    }

    if (cmd_linkage->parsed()) {
      write_text_file(out_dir + "/linkage.csv",
                      linkage_table(link_L, link_min, link_max, link_steps));
      std::printf("wrote %s/linkage.csv (%d rows)\n", out_dir.c_str(), link_steps);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
