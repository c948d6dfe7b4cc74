#include "cablesim/devices.hpp"

#include <cmath>

namespace cablesim {

const char* to_string(FailureCause cause) {
  switch (cause) {
    case FailureCause::CaptureMiss: return "capture-miss";
    case FailureCause::InsertionMiss: return "insertion-miss";
    case FailureCause::Snag: return "snag";
    case FailureCause::CableLost: return "cable-lost";
    case FailureCause::DegenerateOrientation: return "degenerate-orientation";
    case FailureCause::RoutingInfeasible: return "routing-infeasible";
    case FailureCause::Unreachable: return "unreachable";
  }
  return "unknown";
}

void ScottRussellFinger::validate() const {
  if (short_beam <= 0.0) throw ConfigError("scott-russell short beam must be positive");
  if (std::abs(long_beam - 2.0 * short_beam) > 1e-9 * short_beam)
    throw ConfigError("scott-russell long beams must be exactly twice the short beams");
}

double sr_output_height(double L, double a) {
  if (!(L > 0.0)) throw std::domain_error("beam length must be positive");
  if (!(a > 0.0 && a < 2.0 * L)) throw std::domain_error("input must lie in (0, 2L)");
  return 2.0 * std::sqrt(L * L - 0.25 * a * a);
}

double sr_force_ratio(double L, double a) { return sr_output_height(L, a) / a; }

void CorrectionDevice::validate() const {
  if (!(gap_width > 0.0) || !(plug_width > 0.0)) throw ConfigError("device widths must be positive");
  if (!(gap_width < plug_width))
    throw ConfigError("correction gap must be narrower than the plug width");
  if (degenerate_eps < 0.0) throw ConfigError("degenerate cone must be non-negative");
}

std::optional<double> correct_orientation(const CorrectionDevice& device, double roll_in) {
  device.validate();
  if (std::abs(wrap_angle(roll_in - M_PI)) <= device.degenerate_eps) return std::nullopt;
  return 0.0;
}

bool fork_route_feasible(const RoutingFork& fork, const Plug* held_plug) {
  if (held_plug == nullptr) return true;
  return fork.clearance_to_base >= held_plug->height;
}

GripBinding grip_plug(ParallelGripper& gripper, Plug& plug, const Transform& tcp,
                      const Transform& canonical_grasp) {
  if (gripper.state != GripState::Open)
    throw GripError("gripper must be open before gripping");
  if (plug.kind == PlugKind::Industrial && gripper.finger == FingerKind::FormFitParallel)
    throw GripDeniedError(FailureCause::CaptureMiss,
                          "no-grip-surface: parallel finger cannot grip an industrial plug");
  const Vec3 expected = tcp * canonical_grasp.translation;
  if ((plug.body.pose.translation - expected).norm() > gripper.capture_radius)
    throw GripDeniedError(FailureCause::CaptureMiss, "plug outside jaw capture radius");

  // Form-fit cutout: the plug seats at the canonical grasp offset.
  plug.body.pose = tcp * canonical_grasp;
  gripper.state = GripState::Tight;
  GripBinding binding;
  binding.kind = BindingKind::TightPlug;
  binding.plug_id = plug.id;
  binding.plug_in_tcp = canonical_grasp;
  return binding;
}

GripBinding grip_cable(ParallelGripper& gripper, CableState& cable, const CableParams& params,
                       double s, GripState state, const Vec3& jaw_point) {
  if (state == GripState::Open) throw GripError("grip state must be Loose or Tight");
  if (s < -1e-9 || s > params.total_length + 1e-9)
    throw GripError("grip arc length outside the cable");
  double dist = 0.0;
  nearest_arc(cable, jaw_point, &dist);
  if (dist > gripper.capture_radius)
    throw GripDeniedError(FailureCause::CaptureMiss, "cable outside jaw capture radius");

  GripBinding binding;
  binding.arc_s = s;
  if (state == GripState::Tight) {
    cable.constraints.sliding.reset();
    cable.constraints.tight = TightGrip{s, point_at(cable, s)};
    binding.kind = BindingKind::TightCable;
  } else {
    cable.constraints.tight.reset();
    SlidingGrip grip;
    grip.s = s;
    grip.s_min = 0.0;
    grip.s_max = params.total_length;
    grip.jaw_point = jaw_point;
    grip.capture_radius = gripper.capture_radius;
    cable.constraints.sliding = grip;
    binding.kind = BindingKind::LooseCable;
  }
  gripper.state = state;
  return binding;
}

void release(ParallelGripper& gripper, CableState& cable) {
  cable.constraints.tight.reset();
  cable.constraints.sliding.reset();
  gripper.state = GripState::Open;
}

bool try_insert(const Plug& plug, const Socket& socket, const Vec2& lateral_offset) {
  if (std::abs(lateral_offset.x()) > socket.tol_x) return false;
  if (std::abs(lateral_offset.y()) > socket.accept_y()) return false;
  if (plug.kind == PlugKind::Faston && std::abs(wrap_angle(plug.roll)) > 10.0 * M_PI / 180.0)
    return false;
  return true;
}

}  // namespace cablesim
