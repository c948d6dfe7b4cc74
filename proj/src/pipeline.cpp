#include "cablesim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cablesim {

const char* step_name(StepKind kind) {
  switch (kind) {
    case StepKind::PickFromMagazine: return "pick_from_magazine";
    case StepKind::InsertContactBased: return "insert_contact_based";
    case StepKind::InsertDirect: return "insert_direct";
    case StepKind::RouteSegment: return "route_segment";
    case StepKind::CorrectOrientation: return "correct_orientation";
    case StepKind::RegripPlug: return "regrip_plug";
    case StepKind::PickSecondPlug: return "pick_second_plug";
  }
  return "unknown";
}

const char* phase_of(StepKind kind) {
  switch (kind) {
    case StepKind::PickFromMagazine:
    case StepKind::RegripPlug:
    case StepKind::PickSecondPlug: return "Gripping";
    case StepKind::InsertContactBased:
    case StepKind::InsertDirect: return "Insertion";
    case StepKind::RouteSegment: return "Routing";
    case StepKind::CorrectOrientation: return "OrientationCorrection";
  }
  return "unknown";
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double AssemblyReport::total_duration_s() const {
  double t = 0.0;
  for (const auto& s : steps) t += s.duration_s;
  return t;
}

std::vector<PhaseRow> phase_durations(const AssemblyReport& report) {
  const std::vector<std::string> order = {"Gripping", "Insertion", "Routing",
                                          "OrientationCorrection"};
  std::vector<PhaseRow> rows;
  for (const auto& phase : order) {
    PhaseRow row{phase, 0.0, false};
    for (const auto& s : report.steps) {
      if (s.phase != phase) continue;
      if (s.outcome == StepOutcome::SkippedInfeasible) continue;
      row.seconds += s.duration_s;
      row.ran = true;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

int attach_node(const Plug& plug, const CableParams& params) {
  return plug.cable_attach_s < 0.5 * params.total_length ? 0 : params.node_count - 1;
}

void upsert_pin(CableState& cable, int index, const Vec3& position) {
  for (auto& pin : cable.constraints.pins) {
    if (pin.index == index) {
      pin.position = position;
      return;
    }
  }
  cable.constraints.pins.push_back({index, position});
}

void remove_pin(CableState& cable, int index) {
  std::erase_if(cable.constraints.pins, [index](const PinNode& p) { return p.index == index; });
}

}  // namespace

PipelineExecutor::PipelineExecutor(WorkspaceScene scene, const ArmParams& arm,
                                   const ErrorModel& errors, Transform robot_base,
                                   ExecutionConfig cfg, FingerKind finger)
    : scene_(std::move(scene)), robot_(arm, errors, robot_base), cfg_(std::move(cfg)) {
  robot_.set_command_mode(cfg_.mode);
  robot_.set_tcp_speed(cfg_.tcp_speed);
  robot_.set_step_size(cfg_.motion_step);
  robot_.set_pose(cfg_.home);
  gripper_.finger = finger;
}

void PipelineExecutor::event(const std::string& kind, const std::string& detail) {
  report_.trace.push_back({robot_.clock_s(), kind, detail});
}

Transform PipelineExecutor::tcp_for_plug(const Transform& plug_pose) const {
  return plug_pose * cfg_.plug_in_tcp.inverse();
}

Plug& PipelineExecutor::bound_plug() {
  Plug* plug = scene_.plug_by_id(binding_.plug_id);
  if (binding_.kind != BindingKind::TightPlug || plug == nullptr)
    throw StepAbort{FailureCause::CaptureMiss, "step requires a tightly gripped plug"};
  return *plug;
}

void PipelineExecutor::sync_bodies() {
  if (binding_.kind == BindingKind::TightPlug) {
    if (Plug* plug = scene_.plug_by_id(binding_.plug_id)) {
      plug->body.pose = robot_.pose() * binding_.plug_in_tcp;
      const int node = attach_node(*plug, scene_.cable_params);
      upsert_pin(scene_.cable, node, plug->body.pose.translation);
    }
  }
}

void PipelineExecutor::solve_cable() {
  if (scene_.cable.nodes.empty()) return;
  // Pinned plugs anchor their cable node at the current plug pose.
  for (auto& plug : scene_.plugs) {
    const int node = attach_node(plug, scene_.cable_params);
    bool pinned = false;
    for (const auto& pin : scene_.cable.constraints.pins) pinned |= pin.index == node;
    if (pinned) upsert_pin(scene_.cable, node, plug.body.pose.translation);
  }
  if (!cfg_.trace_dir.empty()) {
    SolveTrace trace;
    trace.capture_nodes = true;
    scene_.cable = solve_static(scene_.cable_params, std::move(scene_.cable),
                                scene_.collision_boxes(), SolveOptions{}, &trace);
    char name[64];
    std::snprintf(name, sizeof(name), "/solve_traces/solve_%04d.csv", solve_counter_++);
    std::string csv = "iteration,node,x_mm,y_mm,z_mm\n";
    for (std::size_t it = 0; it < trace.node_frames.size(); ++it) {
      for (std::size_t ni = 0; ni < trace.node_frames[it].size(); ++ni) {
        const Vec3& p = trace.node_frames[it][ni];
        csv += std::to_string(it) + "," + std::to_string(ni) + "," + format_double(p.x()) + "," +
               format_double(p.y()) + "," + format_double(p.z()) + "\n";
      }
    }
    std::FILE* f = std::fopen((cfg_.trace_dir + name).c_str(), "wb");
    if (f != nullptr) {
      std::fwrite(csv.data(), 1, csv.size(), f);
      std::fclose(f);
    }
  } else {
    scene_.cable = solve_static(scene_.cable_params, std::move(scene_.cable),
                                scene_.collision_boxes());
  }
  // A free-dangling plug rides the cable end.
  for (auto& plug : scene_.plugs) {
    const int node = attach_node(plug, scene_.cable_params);
    bool pinned = false;
    for (const auto& pin : scene_.cable.constraints.pins) pinned |= pin.index == node;
    if (!pinned && binding_.plug_id != plug.id) {
      plug.body.pose.translation = scene_.cable.nodes[node] - Vec3(0.0, 0.0, plug.body.half_extents.z());
    }
  }
}

MoveResult PipelineExecutor::move(const Transform& target, MoveKind kind,
                                  const std::vector<int>& exclude) {
  const MoveResult res = robot_.move_to(target, kind, scene_.collision_boxes(exclude), *rng_);
  sync_bodies();
  event("move", "target=" + format_double(target.translation.x()) + "," +
                    format_double(target.translation.y()) + "," +
                    format_double(target.translation.z()) +
                    " traveled=" + format_double(res.traveled));
  if (res.contact) {
    event("contact", "object=" + std::to_string(res.contact->object_id) +
                         " at=" + format_double(res.contact->position.x()) + "," +
                         format_double(res.contact->position.y()) + "," +
                         format_double(res.contact->position.z()));
  }
  return res;
}

void PipelineExecutor::do_pick(const PipelineStep& step) {
  Plug* plug = scene_.plug_by_id(step.plug_id);
  if (plug == nullptr) throw StepAbort{FailureCause::CaptureMiss, "unknown plug"};

  const Transform grasp = tcp_for_plug(plug->body.pose);
  Transform hover = grasp;
  hover.translation.z() += cfg_.pick_hover;
  move(hover, MoveKind::Taught);
  move(grasp, MoveKind::Taught);

  binding_ = grip_plug(gripper_, *plug, robot_.pose(), cfg_.plug_in_tcp);
  robot_.dwell(cfg_.gripper_dwell_s);
  event("grip", plug->name);
  robot_.attach({plug->body, plug->id});
  {
    Box3 local = plug->body;
    local.pose = cfg_.plug_in_tcp;
    robot_.detach(plug->id);
    robot_.attach({local, plug->id});
  }
  sync_bodies();

  Transform up = robot_.pose();
  up.translation.z() += cfg_.pick_hover;
  move(up, MoveKind::Relative);
  solve_cable();
}

void PipelineExecutor::do_insert_contact(const PipelineStep& step) {
  Plug& plug = bound_plug();
  const Socket* socket = scene_.socket_by_id(step.socket_id);
  if (socket == nullptr) throw StepAbort{FailureCause::InsertionMiss, "unknown socket"};

  const Transform& sf = socket->pose;  // slot frame: x tight axis, z up
  const Transform body_in_slot = sf.inverse() * socket->body.pose;
  const double face_x = body_in_slot.translation.x() + socket->body.half_extents.x();
  const double body_top = body_in_slot.translation.z() + socket->body.half_extents.z();
  const double body_base = body_in_slot.translation.z() - socket->body.half_extents.z();
  const double phw = plug.body.half_extents.x();
  const double phz = plug.body.half_extents.z();
  // Search height: plug underside rides just above the housing base so the
  // broad side meets the housing face.
  const double z_search = body_base + 0.5 + phz;
  const double start_x = face_x + phw + cfg_.side_standoff;
  const double z_insert = body_top - cfg_.insert_depth + phz;

  auto plug_target = [&](double x, double z) {
    Transform t = sf * Transform::from_translation({x, 0.0, z});
    t.translation.x() += cfg_.goal_offset.x();
    t.translation.y() += cfg_.goal_offset.y();
    return tcp_for_plug(t);
  };

  // (1) taught approach beside the socket, broad plug side facing it
  const double z_hover = body_top + cfg_.insert_hover + phz;
  MoveResult r = move(plug_target(start_x, z_hover), MoveKind::Taught);
  if (r.contact) throw StepAbort{FailureCause::InsertionMiss, "collision on approach"};
  Transform down = robot_.pose();
  down.translation += sf.rotation * Vec3(0.0, 0.0, z_search - z_hover);
  r = move(down, MoveKind::Relative);
  if (r.contact) throw StepAbort{FailureCause::InsertionMiss, "collision on approach"};

  // (2) guarded horizontal search toward the housing face
  Transform search = robot_.pose();
  search.translation += sf.rotation * Vec3(-cfg_.search_span, 0.0, 0.0);
  r = move(search, MoveKind::Relative);
  if (!r.contact) throw StepAbort{FailureCause::InsertionMiss, "no contact within search span"};
  if (r.contact->object_id != socket->id)
    throw StepAbort{FailureCause::InsertionMiss, "contacted unexpected object"};

  // (3) clear the housing top by h_c, (4) offset by the plug thickness,
  // (5) insert
  const double z_raised = body_top + cfg_.raise_clearance + phz;
  Transform rise = robot_.pose();
  rise.translation += sf.rotation * Vec3(0.0, 0.0, z_raised - z_search);
  r = move(rise, MoveKind::Relative);
  if (r.contact) throw StepAbort{FailureCause::InsertionMiss, "collision above housing"};
  Transform offset = robot_.pose();
  offset.translation += sf.rotation * Vec3(plug.thickness, 0.0, 0.0);
  r = move(offset, MoveKind::Relative);
  if (r.contact) throw StepAbort{FailureCause::InsertionMiss, "collision during offset"};
  Transform descend = robot_.pose();
  descend.translation += sf.rotation * Vec3(0.0, 0.0, z_insert - z_raised);
  r = move(descend, MoveKind::Relative);
  if (r.contact) throw StepAbort{FailureCause::InsertionMiss, "collision during insertion"};

  const Vec3 local = sf.inverse() * plug.body.pose.translation;
  event("insert", socket->name + " residual=" + format_double(local.x()) + "," +
                      format_double(local.y()));
  if (!try_insert(plug, *socket, {local.x(), local.y()}))
    throw StepAbort{FailureCause::InsertionMiss, "outside tolerance window"};

  // Seat the plug, release, retreat.
  plug.body.pose = sf * Transform::from_translation({0.0, 0.0, z_insert});
  const int node = attach_node(plug, scene_.cable_params);
  upsert_pin(scene_.cable, node, plug.body.pose.translation);
  robot_.detach(plug.id);
  release(gripper_, scene_.cable);
  binding_ = GripBinding{};
  robot_.dwell(cfg_.gripper_dwell_s);
  event("release", socket->name);
  Transform retreat = robot_.pose();
  retreat.translation += Vec3(0.0, 0.0, cfg_.insert_hover);
  move(retreat, MoveKind::Relative);
  solve_cable();
}

void PipelineExecutor::do_insert_direct(const PipelineStep& step) {
  Plug& plug = bound_plug();
  const Socket* socket = scene_.socket_by_id(step.socket_id);
  if (socket == nullptr) throw StepAbort{FailureCause::InsertionMiss, "unknown socket"};

  const Transform& sf = socket->pose;
  const Transform body_in_slot = sf.inverse() * socket->body.pose;
  const double body_top = body_in_slot.translation.z() + socket->body.half_extents.z();
  const double phz = plug.body.half_extents.z();
  const double z_insert = body_top - cfg_.insert_depth + phz;

  Transform hover = sf * Transform::from_translation({0.0, 0.0, body_top + cfg_.insert_hover});
  hover.translation.x() += cfg_.goal_offset.x();
  hover.translation.y() += cfg_.goal_offset.y();
  MoveResult r = move(tcp_for_plug(hover), MoveKind::Taught);
  if (r.contact) throw StepAbort{FailureCause::InsertionMiss, "collision on approach"};

  Transform descend = robot_.pose();
  descend.translation += sf.rotation * Vec3(0.0, 0.0, z_insert - (body_top + cfg_.insert_hover));
  r = move(descend, MoveKind::Relative, {socket->id});
  if (r.contact) throw StepAbort{FailureCause::InsertionMiss, "collision during insertion"};

  const Vec3 local = sf.inverse() * plug.body.pose.translation;
  event("insert", socket->name + " residual=" + format_double(local.x()) + "," +
                      format_double(local.y()));
  if (!try_insert(plug, *socket, {local.x(), local.y()}))
    throw StepAbort{FailureCause::InsertionMiss, "outside tolerance window"};

  plug.body.pose = sf * Transform::from_translation({0.0, 0.0, z_insert});
  const int node = attach_node(plug, scene_.cable_params);
  upsert_pin(scene_.cable, node, plug.body.pose.translation);
  robot_.detach(plug.id);
  release(gripper_, scene_.cable);
  binding_ = GripBinding{};
  robot_.dwell(cfg_.gripper_dwell_s);
  event("release", socket->name);
  Transform retreat = robot_.pose();
  retreat.translation += Vec3(0.0, 0.0, cfg_.insert_hover);
  move(retreat, MoveKind::Relative, {socket->id});
  solve_cable();
}

void PipelineExecutor::ensure_loose_grip() {
  if (scene_.cable.constraints.sliding) return;
  // First routing move: grip the cable right beside the pinned plug; the
  // point follows from the seated plug pose.
  const double s0 = cfg_.route_grip_arc;
  const Vec3 grip_point = point_at(scene_.cable, s0);
  Transform target = cfg_.home;
  target.translation = grip_point;
  move(target, MoveKind::Taught);
  grip_cable(gripper_, scene_.cable, scene_.cable_params, s0, GripState::Loose,
             robot_.pose().translation);
  robot_.dwell(cfg_.gripper_dwell_s);
  event("grip", "cable loose s=" + format_double(s0));
  solve_cable();
}

void PipelineExecutor::do_route(const PipelineStep& step, StepResult& result) {
  const RoutingFork* fork = scene_.fork_by_id(step.fork_id);
  if (fork == nullptr) throw StepAbort{FailureCause::CaptureMiss, "unknown fork"};

  // A plug hanging below the gripper gates routability.
  const Plug* held = binding_.kind == BindingKind::TightPlug ? scene_.plug_by_id(binding_.plug_id)
                                                             : nullptr;
  if (!fork_route_feasible(*fork, held)) {
    result.outcome = StepOutcome::SkippedInfeasible;
    result.cause = FailureCause::RoutingInfeasible;
    event("route", fork->name + " skipped-infeasible");
    return;
  }

  const RouteLeg* leg = nullptr;
  for (const auto& l : cfg_.route_legs)
    if (l.fork_id == step.fork_id) leg = &l;
  if (leg == nullptr) throw StepAbort{FailureCause::CaptureMiss, "no route leg for fork"};

  if (held != nullptr) {
    // Industrial method: the cable is dragged by the welded plug, no sliding.
    for (const auto& wp : leg->waypoints) {
      Transform target = cfg_.home;
      target.translation = wp;
      move(target, MoveKind::Taught);
      solve_cable();
      ++report_.waypoint_count;
    }
    const auto snag = check_snag_at(scene_.cable_params, scene_.cable, scene_.collision_boxes(),
                                    fork->approach_dir, held->body.pose.translation);
    if (snag && snag->blocked) {
      event("snag", "node=" + std::to_string(snag->node_index) +
                        " wrap=" + format_double(snag->wrap_angle));
      throw StepAbort{FailureCause::Snag, "cable snagged on an obstacle edge"};
    }
    Transform push = robot_.pose();
    push.translation += fork->approach_dir * leg->approach_distance;
    move(push, MoveKind::Relative);
    solve_cable();

    double clip_dist = 0.0;
    const double clip_s = nearest_arc(scene_.cable, fork->pose.translation, &clip_dist);
    if (clip_dist > fork->capture_radius)
      throw StepAbort{FailureCause::CaptureMiss, "cable missed the fork"};
    const double ell = scene_.cable_params.segment_length();
    const int clip_node = std::clamp(static_cast<int>(std::lround(clip_s / ell)), 0,
                                     scene_.cable_params.node_count - 1);
    scene_.cable.constraints.clips.push_back({clip_node, fork->id, fork->pose.translation});
    event("clip", fork->name + " node=" + std::to_string(clip_node));
    solve_cable();
    routing_started_ = true;
    return;
  }

  ensure_loose_grip();

  for (const auto& wp : leg->waypoints) {
    Transform target = cfg_.home;
    target.translation = wp;
    move(target, MoveKind::Taught);
    const SlideResult slide =
        slide_grip(scene_.cable_params, scene_.cable, robot_.pose().translation,
                   scene_.collision_boxes());
    event("slide", "s=" + format_double(slide.s) + " gap=" + format_double(slide.jaw_distance));
    ++report_.waypoint_count;
  }

  // Tighten at the approach point and push into the fork.
  const double s = scene_.cable.constraints.sliding->s;
  scene_.cable.constraints.sliding.reset();
  gripper_.state = GripState::Open;
  grip_cable(gripper_, scene_.cable, scene_.cable_params, s, GripState::Tight,
             robot_.pose().translation);
  scene_.cable.constraints.tight->grip_point = robot_.pose().translation;
  robot_.dwell(cfg_.gripper_dwell_s);
  event("grip", "cable tight s=" + format_double(s));
  solve_cable();

  const auto snag = check_snag(scene_.cable_params, scene_.cable, scene_.collision_boxes(),
                               fork->approach_dir);
  if (snag && snag->blocked) {
    event("snag", "node=" + std::to_string(snag->node_index) +
                      " wrap=" + format_double(snag->wrap_angle));
    throw StepAbort{FailureCause::Snag, "cable snagged on an obstacle edge"};
  }

  Transform push = robot_.pose();
  push.translation += fork->approach_dir * leg->approach_distance;
  move(push, MoveKind::Relative);
  scene_.cable.constraints.tight->grip_point = robot_.pose().translation;
  solve_cable();

  double clip_dist = 0.0;
  const double clip_s = nearest_arc(scene_.cable, fork->pose.translation, &clip_dist);
  if (clip_dist > fork->capture_radius)
    throw StepAbort{FailureCause::CaptureMiss, "cable missed the fork"};
  const double ell = scene_.cable_params.segment_length();
  const int clip_node =
      std::clamp(static_cast<int>(std::lround(clip_s / ell)), 0, scene_.cable_params.node_count - 1);
  scene_.cable.constraints.clips.push_back({clip_node, fork->id, fork->pose.translation});
  event("clip", fork->name + " node=" + std::to_string(clip_node));

  // Loosen and carry on.
  scene_.cable.constraints.tight.reset();
  gripper_.state = GripState::Open;
  grip_cable(gripper_, scene_.cable, scene_.cable_params, s, GripState::Loose,
             robot_.pose().translation);
  robot_.dwell(cfg_.gripper_dwell_s);
  solve_cable();
  routing_started_ = true;
}

void PipelineExecutor::do_correct_orientation(const PipelineStep& step) {
  (void)step;
  if (!scene_.correction) throw StepAbort{FailureCause::DegenerateOrientation, "no device"};
  const CorrectionDevice& device = *scene_.correction;
  Plug* plug = nullptr;
  for (auto& p : scene_.plugs) {
    const int node = attach_node(p, scene_.cable_params);
    if (node == scene_.cable_params.node_count - 1) plug = &p;
  }
  if (plug == nullptr) throw StepAbort{FailureCause::DegenerateOrientation, "no free-end plug"};

  ensure_loose_grip();
  // Slide along the cable until right before the second plug.
  for (const auto& wp : cfg_.end_slide_waypoints) {
    Transform target = cfg_.home;
    target.translation = wp;
    move(target, MoveKind::Taught);
    const SlideResult slide =
        slide_grip(scene_.cable_params, scene_.cable, robot_.pose().translation,
                   scene_.collision_boxes());
    event("slide", "s=" + format_double(slide.s) + " gap=" + format_double(slide.jaw_distance));
    ++report_.waypoint_count;
  }

  const double s = std::min(scene_.cable.constraints.sliding->s,
                            scene_.cable_params.total_length - cfg_.tail_grip_arc);
  scene_.cable.constraints.sliding.reset();
  gripper_.state = GripState::Open;
  grip_cable(gripper_, scene_.cable, scene_.cable_params, s, GripState::Tight,
             robot_.pose().translation);
  scene_.cable.constraints.tight->grip_point = robot_.pose().translation;
  robot_.dwell(cfg_.gripper_dwell_s);
  solve_cable();

  // Bring the dangling plug underneath the gap, then pull it up through.
  Transform below = cfg_.home;
  below.translation = device.pose.translation + Vec3(0.0, 0.0, -cfg_.correction_drop);
  move(below, MoveKind::Taught);
  scene_.cable.constraints.tight->grip_point = robot_.pose().translation;
  solve_cable();

  Transform up = robot_.pose();
  up.translation.z() += cfg_.correction_rise;
  move(up, MoveKind::Relative);
  scene_.cable.constraints.tight->grip_point = robot_.pose().translation;
  solve_cable();

  const auto corrected = correct_orientation(device, plug->roll);
  if (!corrected) {
    event("correct", "jam roll=" + format_double(plug->roll));
    throw StepAbort{FailureCause::DegenerateOrientation, "plug entered the gap upside-down"};
  }
  plug->roll = *corrected;
  plug->body.pose = device.pose;
  event("correct", "roll=" + format_double(plug->roll));

  // The pillars hold the plug; the robot lets go of the cable.
  upsert_pin(scene_.cable, scene_.cable_params.node_count - 1, plug->body.pose.translation);
  release(gripper_, scene_.cable);
  robot_.dwell(cfg_.gripper_dwell_s);
  Transform retreat = robot_.pose();
  retreat.translation.z() += cfg_.pick_hover;
  move(retreat, MoveKind::Relative);
  solve_cable();
}

void PipelineExecutor::do_regrip(const PipelineStep& step) {
  Plug* plug = scene_.plug_by_id(step.plug_id);
  if (plug == nullptr) throw StepAbort{FailureCause::CaptureMiss, "unknown plug"};

  const Transform grasp = tcp_for_plug(plug->body.pose);
  Transform hover = grasp;
  hover.translation.z() += cfg_.pick_hover;
  move(hover, MoveKind::Taught);
  move(grasp, MoveKind::Taught);
  binding_ = grip_plug(gripper_, *plug, robot_.pose(), cfg_.plug_in_tcp);
  robot_.dwell(cfg_.gripper_dwell_s);
  event("grip", plug->name);
  Box3 local = plug->body;
  local.pose = cfg_.plug_in_tcp;
  robot_.attach({local, plug->id});
  sync_bodies();

  Transform up = robot_.pose();
  up.translation.z() += cfg_.pick_hover;
  move(up, MoveKind::Relative);
  solve_cable();
}

AssemblyReport PipelineExecutor::run(const std::vector<PipelineStep>& steps, std::uint64_t seed,
                                     const RunOptions& opts) {
  report_ = AssemblyReport{};
  report_.seed = seed;
  report_.scene_hash = cfg_.scene_hash;
  rng_.emplace(seed);
  solve_cable();

  bool aborted = false;
  for (const auto& step : steps) {
    StepResult result;
    result.kind = step.kind;
    result.name = step_name(step.kind);
    result.phase = phase_of(step.kind);
    const double t0 = robot_.clock_s();
    try {
      switch (step.kind) {
        case StepKind::PickFromMagazine:
        case StepKind::PickSecondPlug: do_pick(step); break;
        case StepKind::InsertContactBased: do_insert_contact(step); break;
        case StepKind::InsertDirect: do_insert_direct(step); break;
        case StepKind::RouteSegment: do_route(step, result); break;
        case StepKind::CorrectOrientation: do_correct_orientation(step); break;
        case StepKind::RegripPlug: do_regrip(step); break;
      }
    } catch (const StepAbort& abort) {
      result.outcome = StepOutcome::Failure;
      result.cause = abort.cause;
      event("abort", abort.detail);
    } catch (const GripDeniedError& e) {
      result.outcome = StepOutcome::Failure;
      result.cause = e.cause;
      event("abort", e.what());
    } catch (const CableLostError& e) {
      result.outcome = StepOutcome::Failure;
      result.cause = FailureCause::CableLost;
      event("abort", e.what());
    } catch (const OverstretchError& e) {
      result.outcome = StepOutcome::Failure;
      result.cause = FailureCause::CableLost;
      event("abort", e.what());
    } catch (const UnreachableError& e) {
      result.outcome = StepOutcome::Failure;
      result.cause = FailureCause::Unreachable;
      event("abort", e.what());
    } catch (const JointLimitError& e) {
      result.outcome = StepOutcome::Failure;
      result.cause = FailureCause::Unreachable;
      event("abort", e.what());
    }
    result.duration_s = robot_.clock_s() - t0;
    report_.steps.push_back(result);
    if (result.outcome == StepOutcome::Failure) {
      report_.failure = result.cause;
      aborted = true;
      break;
    }
    if (opts.stop_after_first_insertion && (step.kind == StepKind::InsertContactBased ||
                                            step.kind == StepKind::InsertDirect)) {
      break;
    }
  }
  report_.total_success = !aborted;
  return report_;
}

}  // namespace cablesim
