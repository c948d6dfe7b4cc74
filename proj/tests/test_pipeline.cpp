#include <cmath>

#include "cablesim/experiment.hpp"
#include "cablesim/scenario.hpp"
#include "doctest.h"

using namespace cablesim;

namespace {

ScenarioConfig faston() {
  return load_scenario_or_throw(std::string(SCENARIO_DIR) + "/faston_default.toml");
}

ScenarioConfig industrial() {
  return load_scenario_or_throw(std::string(SCENARIO_DIR) + "/industrial_default.toml");
}

void zero_noise(ScenarioConfig& cfg) {
  cfg.errors.pose_mode_sigma = 0.0;
  cfg.errors.pose_mode_max = 0.0;
  cfg.errors.joint_mode_sigma = 0.0;
  cfg.errors.joint_mode_max = 0.0;
  cfg.errors.taught_bias = Vec3::Zero();
}

double phase_seconds(const AssemblyReport& report, const std::string& phase) {
  for (const auto& row : phase_durations(report))
    if (row.phase == phase) return row.ran ? row.seconds : -1.0;
  return -1.0;
}

}  // namespace

TEST_CASE("faston pipeline zero noise succeeds end to end") {
  ScenarioConfig cfg = faston();
  zero_noise(cfg);
  PipelineExecutor exec = cfg.make_executor();
  const AssemblyReport report = exec.run(cfg.pipeline, 7);

  for (const auto& s : report.steps) {
    INFO(s.name, " cause=", s.cause ? to_string(*s.cause) : "none");
    CHECK(s.outcome == StepOutcome::Success);
  }
  CHECK(report.total_success);
  CHECK(report.steps.size() == 7);

  // cable consistent after the run
  const auto& scene = exec.scene();
  const double ell = scene.cable_params.segment_length();
  for (std::size_t i = 0; i + 1 < scene.cable.nodes.size(); ++i) {
    const double len = (scene.cable.nodes[i + 1] - scene.cable.nodes[i]).norm();
    CHECK(std::abs(len - ell) <= 1e-6 * ell);
  }
  // both forks hold the cable
  CHECK(scene.cable.constraints.clips.size() == 2);
}

TEST_CASE("faston phase ordering matches the duration table") {
  ScenarioConfig cfg = faston();
  zero_noise(cfg);
  PipelineExecutor exec = cfg.make_executor();
  const AssemblyReport report = exec.run(cfg.pipeline, 7);
  REQUIRE(report.total_success);

  const double g = phase_seconds(report, "Gripping");
  const double i = phase_seconds(report, "Insertion");
  const double r = phase_seconds(report, "Routing");
  const double oc = phase_seconds(report, "OrientationCorrection");
  INFO("G=", g, " I=", i, " R=", r, " OC=", oc);
  CHECK(r > oc);
  CHECK(oc > g);
  CHECK(oc > i);
  CHECK(r >= 5.0 * i);
  CHECK(std::abs(g - i) <= 0.5 * std::max(g, i));
}

TEST_CASE("upside-down second plug jams the correction device") {
  ScenarioConfig cfg = faston();
  zero_noise(cfg);
  cfg.scene.plugs[1].roll = M_PI;
  PipelineExecutor exec = cfg.make_executor();
  const AssemblyReport report = exec.run(cfg.pipeline, 7);
  CHECK_FALSE(report.total_success);
  REQUIRE(report.failure.has_value());
  CHECK(*report.failure == FailureCause::DegenerateOrientation);
  CHECK(report.steps.back().name == "correct_orientation");
}

TEST_CASE("contact-based insertion absorbs large x offsets, y is uncorrected") {
  ScenarioConfig cfg = faston();
  zero_noise(cfg);

  SUBCASE("x offset within the search span") {
    PipelineExecutor exec = cfg.make_executor({4.0, 0.0});
    RunOptions opts;
    opts.stop_after_first_insertion = true;
    const AssemblyReport report = exec.run(cfg.pipeline, 3, opts);
    CHECK(report.total_success);
  }
  SUBCASE("x offset beyond the search span misses") {
    PipelineExecutor exec = cfg.make_executor({20.0, 0.0});
    RunOptions opts;
    opts.stop_after_first_insertion = true;
    const AssemblyReport report = exec.run(cfg.pipeline, 3, opts);
    CHECK_FALSE(report.total_success);
    CHECK(*report.failure == FailureCause::InsertionMiss);
  }
  SUBCASE("y offset is not corrected by the side search") {
    PipelineExecutor exec = cfg.make_executor({0.0, 5.0});
    RunOptions opts;
    opts.stop_after_first_insertion = true;
    const AssemblyReport report = exec.run(cfg.pipeline, 3, opts);
    CHECK_FALSE(report.total_success);
    CHECK(*report.failure == FailureCause::InsertionMiss);
  }
}

TEST_CASE("identical scene and seed give byte-identical reports") {
  ScenarioConfig cfg = faston();
  PipelineExecutor a = cfg.make_executor();
  PipelineExecutor b = cfg.make_executor();
  const std::string ja = report_to_json(a.run(cfg.pipeline, 12345));
  const std::string jb = report_to_json(b.run(cfg.pipeline, 12345));
  CHECK(ja == jb);
  PipelineExecutor c = cfg.make_executor();
  const std::string jc = report_to_json(c.run(cfg.pipeline, 54321));
  CHECK(ja != jc);  // the seed matters
}

TEST_CASE("default-noise faston monte carlo: at least 19 of 20 succeed") {
  const ScenarioConfig cfg = faston();
  const BatchResult batch = run_batch(cfg, 20, 424242);
  INFO("successes=", batch.successes);
  CHECK(batch.successes >= 19);
}

TEST_CASE("industrial pipeline skips infeasible routing and still succeeds") {
  ScenarioConfig cfg = industrial();
  zero_noise(cfg);
  PipelineExecutor exec = cfg.make_executor();
  const AssemblyReport report = exec.run(cfg.pipeline, 11);
  CHECK(report.total_success);

  const StepResult* route = nullptr;
  for (const auto& s : report.steps)
    if (s.kind == StepKind::RouteSegment) route = &s;
  REQUIRE(route != nullptr);
  CHECK(route->outcome == StepOutcome::SkippedInfeasible);
  CHECK(*route->cause == FailureCause::RoutingInfeasible);

  // routing and orientation correction come out as dashes
  for (const auto& row : phase_durations(report)) {
    if (row.phase == "Routing" || row.phase == "OrientationCorrection") CHECK_FALSE(row.ran);
    if (row.phase == "Gripping" || row.phase == "Insertion") CHECK(row.ran);
  }
}

TEST_CASE("raising the fork clearance makes industrial routing run") {
  ScenarioConfig cfg = industrial();
  zero_noise(cfg);
  cfg.scene.forks[0].clearance_to_base = 40.0;
  PipelineExecutor exec = cfg.make_executor();
  const AssemblyReport report = exec.run(cfg.pipeline, 11);
  for (const auto& s : report.steps) {
    INFO(s.name, " cause=", s.cause ? to_string(*s.cause) : "none");
    CHECK(s.outcome == StepOutcome::Success);
  }
  CHECK(report.total_success);
  CHECK(exec.scene().cable.constraints.clips.size() == 1);
}

TEST_CASE("plain parallel finger cannot pick the industrial plug") {
  ScenarioConfig cfg = industrial();
  zero_noise(cfg);
  cfg.finger = FingerKind::FormFitParallel;
  PipelineExecutor exec = cfg.make_executor();
  const AssemblyReport report = exec.run(cfg.pipeline, 11);
  CHECK_FALSE(report.total_success);
  CHECK(report.steps.size() == 1);
  CHECK(*report.failure == FailureCause::CaptureMiss);
  // the trace names the missing grip surface
  bool mentioned = false;
  for (const auto& e : report.trace) mentioned |= e.detail.find("no-grip-surface") != std::string::npos;
  CHECK(mentioned);
}

TEST_CASE("route step through a wrapping corner snags") {
  // Minimal scene built in code: the pull around a sharp box corner wraps the
  // cable beyond the blocking threshold.
  ScenarioConfig cfg = faston();
  zero_noise(cfg);
  WorkspaceScene scene;
  scene.cable_params.total_length = 200.0;
  scene.cable_params.node_count = 50;
  scene.cable_params.bending_stiffness = 1.0;  // limp cable, sharp wraps
  scene.cable_params.weight_per_length = 0.01;
  scene.cable = CableState::straight_line(scene.cable_params, {60, 5, 2}, {-140, 5, 2});
  scene.cable.constraints.pins = {{0, {60, 5, 2}}};

  Box3 board;
  board.pose.translation = {0, 0, -10};
  board.half_extents = {300, 300, 10};
  board.id = 100;
  Box3 corner_box;
  corner_box.pose.translation = {30, -10, 5};
  corner_box.half_extents = {10, 10, 5};
  corner_box.id = 101;
  scene.obstacles = {board, corner_box};

  RoutingFork fork;
  fork.pose = Transform::from_translation({16, -26, 2});
  fork.approach_dir = {0, -1, 0};
  fork.capture_radius = 3.0;
  fork.clearance_to_base = 25.0;
  fork.id = 300;
  fork.name = "snag_fork";
  scene.forks = {fork};

  ExecutionConfig exec_cfg = cfg.exec;
  exec_cfg.route_legs = {{300, {{40, 10, 3}, {24, 8, 3}, {16, -4, 3}, {16, -14, 3}}, 12.0}};
  exec_cfg.route_grip_arc = 12.0;

  PipelineExecutor exec(scene, cfg.arm, cfg.errors, cfg.robot_base, exec_cfg, cfg.finger);
  PipelineStep step;
  step.kind = StepKind::RouteSegment;
  step.fork_id = 300;
  const AssemblyReport report = exec.run({step}, 5);
  CHECK_FALSE(report.total_success);
  REQUIRE(report.failure.has_value());
  CHECK(*report.failure == FailureCause::Snag);
}

TEST_CASE("route step through a straight corridor clips the fork") {
  ScenarioConfig cfg = faston();
  zero_noise(cfg);
  WorkspaceScene scene;
  scene.cable_params.total_length = 200.0;
  scene.cable_params.node_count = 50;
  scene.cable_params.bending_stiffness = 50.0;
  scene.cable_params.weight_per_length = 0.01;
  scene.cable = CableState::straight_line(scene.cable_params, {60, 5, 2}, {-140, 5, 2});
  scene.cable.constraints.pins = {{0, {60, 5, 2}}};

  Box3 board;
  board.pose.translation = {0, 0, -10};
  board.half_extents = {300, 300, 10};
  board.id = 100;
  scene.obstacles = {board};

  RoutingFork fork;
  fork.pose = Transform::from_translation({10, 5, 6});
  fork.approach_dir = {0, 1, 0};
  fork.capture_radius = 3.0;
  fork.id = 300;
  fork.name = "corridor_fork";
  scene.forks = {fork};

  ExecutionConfig exec_cfg = cfg.exec;
  exec_cfg.route_legs = {{300, {{40, 5, 4}, {25, 5, 4}, {10, -7, 4}}, 12.0}};
  exec_cfg.route_grip_arc = 12.0;

  PipelineExecutor exec(scene, cfg.arm, cfg.errors, cfg.robot_base, exec_cfg, cfg.finger);
  PipelineStep step;
  step.kind = StepKind::RouteSegment;
  step.fork_id = 300;
  const AssemblyReport report = exec.run({step}, 5);
  CHECK(report.total_success);
  REQUIRE(exec.scene().cable.constraints.clips.size() == 1);
  CHECK(exec.scene().cable.constraints.clips[0].fork_id == 300);
}

TEST_CASE("phase table rows: empty pipeline yields all-zero durations") {
  ScenarioConfig cfg = faston();
  PipelineExecutor exec = cfg.make_executor();
  const AssemblyReport report = exec.run({}, 1);
  CHECK(report.total_success);
  const auto rows = phase_durations(report);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.seconds == 0.0);
    CHECK_FALSE(row.ran);
  }
}
