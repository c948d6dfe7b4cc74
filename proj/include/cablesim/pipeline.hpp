#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cablesim/robot.hpp"
#include "cablesim/scene.hpp"

namespace cablesim {

enum class StepKind {
  PickFromMagazine,
  InsertContactBased,
  InsertDirect,
  RouteSegment,
  CorrectOrientation,
  RegripPlug,
  PickSecondPlug,
};

const char* step_name(StepKind kind);
const char* phase_of(StepKind kind);  // Gripping / Insertion / Routing / OrientationCorrection

struct PipelineStep {
  StepKind kind;
  int plug_id = -1;
  int socket_id = -1;
  int fork_id = -1;
};

// Authored waypoints guiding the sliding grip to one fork; the last waypoint
// is the fork approach point.
struct RouteLeg {
  int fork_id = -1;
  std::vector<Vec3> waypoints;
  double approach_distance = 10.0;  // mm, tight-grip push into the fork
};

struct ExecutionConfig {
  CommandMode mode = CommandMode::JointInput;
  double tcp_speed = 100.0;      // mm/s
  double gripper_dwell_s = 1.0;  // per actuation
  double motion_step = 0.1;      // mm

  double pick_hover = 40.0;

  double side_standoff = 6.0;    // start gap from the housing face (>= 3)
  double search_span = 15.0;
  double raise_clearance = 5.0;  // h_c
  double insert_depth = 6.0;     // plug travel below the slot top
  double insert_hover = 30.0;

  double route_grip_arc = 15.0;  // first loose-grip point from the pinned end
  std::vector<RouteLeg> route_legs;
  std::vector<Vec3> end_slide_waypoints;
  double tail_grip_arc = 20.0;

  double correction_drop = 25.0;  // jaw point below the gap before the pull
  double correction_rise = 35.0;

  Vec2 goal_offset{0.0, 0.0};  // injected into insertion taught goals (sweeps)
  Transform home;
  Transform plug_in_tcp = Transform::from_translation({0.0, 0.0, -30.0});

  std::string trace_dir;  // when set, every cable solve dumps a node CSV
  std::string scene_hash; // stamped into reports
};

enum class StepOutcome { Success, Failure, SkippedInfeasible };

struct StepResult {
  StepKind kind;
  std::string name;
  std::string phase;
  StepOutcome outcome = StepOutcome::Success;
  std::optional<FailureCause> cause;
  double duration_s = 0.0;
};

struct TraceEvent {
  double t = 0.0;
  std::string kind;
  std::string detail;
};

struct AssemblyReport {
  std::vector<StepResult> steps;
  std::vector<TraceEvent> trace;
  bool total_success = false;
  std::optional<FailureCause> failure;
  std::uint64_t seed = 0;
  std::string scene_hash;
  int waypoint_count = 0;

  double total_duration_s() const;
};

struct PhaseRow {
  std::string phase;
  double seconds = 0.0;
  bool ran = false;  // printed as a dash when false
};

// Fixed four-row table in Gripping / Insertion / Routing /
// OrientationCorrection order; skipped or absent phases keep seconds 0 and
// ran = false.
std::vector<PhaseRow> phase_durations(const AssemblyReport& report);

struct RunOptions {
  bool stop_after_first_insertion = false;  // offset-sweep protocol
};

// Executes a step list against a private copy of the scene. One executor per
// trial; trials are independent and may run concurrently.
class PipelineExecutor {
 public:
  PipelineExecutor(WorkspaceScene scene, const ArmParams& arm, const ErrorModel& errors,
                   Transform robot_base, ExecutionConfig cfg, FingerKind finger);

  AssemblyReport run(const std::vector<PipelineStep>& steps, std::uint64_t seed,
                     const RunOptions& opts = {});

  const WorkspaceScene& scene() const { return scene_; }

 private:
  struct StepAbort {
    FailureCause cause;
    std::string detail;
  };

  void do_pick(const PipelineStep& step);
  void do_insert_contact(const PipelineStep& step);
  void do_insert_direct(const PipelineStep& step);
  void do_route(const PipelineStep& step, StepResult& result);
  void do_correct_orientation(const PipelineStep& step);
  void do_regrip(const PipelineStep& step);

  MoveResult move(const Transform& target, MoveKind kind, const std::vector<int>& exclude = {});
  void sync_bodies();
  void solve_cable();
  void ensure_loose_grip();
  void event(const std::string& kind, const std::string& detail);
  Transform tcp_for_plug(const Transform& plug_pose) const;
  Plug& bound_plug();

  WorkspaceScene scene_;
  Robot robot_;
  ParallelGripper gripper_;
  ExecutionConfig cfg_;
  GripBinding binding_;
  std::optional<Rng> rng_;
  AssemblyReport report_;
  bool routing_started_ = false;
  int solve_counter_ = 0;
};

// Canonical formatting used by every serializer: fixed precision keeps
// repeated runs byte-identical.
std::string format_double(double v);

}  // namespace cablesim
