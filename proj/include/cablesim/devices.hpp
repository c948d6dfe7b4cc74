#pragma once

#include <optional>
#include <string>

#include "cablesim/cable.hpp"
#include "cablesim/errors.hpp"
#include "cablesim/geometry.hpp"

namespace cablesim {

// Closed failure taxonomy used across pipeline reports.
enum class FailureCause {
  CaptureMiss,
  InsertionMiss,
  Snag,
  CableLost,
  DegenerateOrientation,
  RoutingInfeasible,
  Unreachable,
};

const char* to_string(FailureCause cause);

enum class PlugKind { Faston, Industrial };

struct Plug {
  PlugKind kind = PlugKind::Faston;
  Box3 body;                    // current world pose
  double thickness = 0.8;      // mm, along the insertion-tight axis
  double width = 6.0;          // mm
  double height = 30.0;        // mm, Industrial body height below the grip
  double roll = 0.0;           // rad, free roll about the cable axis (Faston only)
  double cable_attach_s = 0.0; // 0 or cable total length
  int id = -1;
  std::string name;
};

struct Socket {
  Transform pose;        // slot center; insertion axis is vertical (-z approach)
  double tol_x = 0.45;   // mm half-width
  double tol_y = 0.45;   // mm half-width
  double chamfer_y = 1.05;  // extra y acceptance from the chamfer funnel
  bool clasp = false;    // compliant clasp (industrial socket)
  Box3 body;             // physical body, contact target of the side search
  int id = -1;
  std::string name;

  double accept_y() const { return tol_y + chamfer_y; }
};

enum class FingerKind { FormFitParallel, ScottRussell };
enum class GripState { Open, Loose, Tight };

struct ParallelGripper {
  double jaw_opening = 0.0;  // mm
  double jaw_max = 80.0;
  GripState state = GripState::Open;
  FingerKind finger = FingerKind::FormFitParallel;
  Box3 fingertip;            // narrow tip, in the TCP frame
  double capture_radius = 4.0;
  bool finger_switching = false;  // capability flag only
};

// Scott-Russell linkage: two long beams of length 2L ride the horizontal
// gripper input, pinned at their midpoints to short beams of length L
// anchored at the flange; the tip travels an exact vertical line.
struct ScottRussellFinger {
  double short_beam = 40.0;  // L, mm
  double long_beam = 80.0;   // must equal 2L
  Transform anchor;          // fixed to the flange

  void validate() const;
};

// Tip height above the anchor for horizontal input a: y = 2*sqrt(L^2 - a^2/4).
double sr_output_height(double L, double a);

// Vertical output force per horizontal input force, |da/dy| by virtual work.
double sr_force_ratio(double L, double a);

struct CorrectionDevice {
  Transform pose;              // gap center between the pillars
  double gap_width = 4.0;      // g, must be narrower than the plug width
  double plug_width = 6.0;     // w_p of the plug this device serves
  double degenerate_eps = 0.05;  // rad, jam cone half-angle around roll = pi
  std::array<Box3, 2> pillars;

  void validate() const;
};

// Pulling the dangling plug up through the gap forces it upright; the jam
// case is a roll within eps of exactly upside-down entry. Returns the
// corrected roll (always 0) or nullopt on a jam.
std::optional<double> correct_orientation(const CorrectionDevice& device, double roll_in);

struct RoutingFork {
  Transform pose;             // clip point
  double capture_radius = 3.0;
  Vec3 approach_dir{0.0, 0.0, -1.0};  // required insertion direction, unit
  double clearance_to_base = 25.0;    // mm from fork to the board base
  int id = -1;
  std::string name;
};

// A fork is routable unless the plug hanging below the gripper is taller
// than the fork-to-base clearance (boundary inclusive).
bool fork_route_feasible(const RoutingFork& fork, const Plug* held_plug);

struct Magazine {
  std::vector<Transform> slots;  // definite plug poses
  bool holds_both_ends = false;
  int id = -1;
};

enum class BindingKind { None, TightPlug, TightCable, LooseCable };

struct GripBinding {
  BindingKind kind = BindingKind::None;
  int plug_id = -1;
  Transform plug_in_tcp;  // canonical form-fit grasp offset (TightPlug)
  double arc_s = 0.0;     // cable bindings
};

struct GripDeniedError : GripError {
  FailureCause cause;
  GripDeniedError(FailureCause c, const std::string& what) : GripError(what), cause(c) {}
};

// Tight grip on a plug. The form-fit cutout snaps the plug to the canonical
// grasp pose, so capture within the radius yields a deterministic binding.
// A plain parallel finger cannot reach any grip surface on an industrial
// plug.
GripBinding grip_plug(ParallelGripper& gripper, Plug& plug, const Transform& tcp,
                      const Transform& canonical_grasp);

// Grip the cable at arc length s: Tight welds the point, Loose installs a
// sliding (bead) constraint.
GripBinding grip_cable(ParallelGripper& gripper, CableState& cable, const CableParams& params,
                       double s, GripState state, const Vec3& jaw_point);

void release(ParallelGripper& gripper, CableState& cable);

// Lateral acceptance test of the vertical insertion; the chamfer funnels the
// y axis only, and a Faston plug must additionally hang upright.
bool try_insert(const Plug& plug, const Socket& socket, const Vec2& lateral_offset);

}  // namespace cablesim
