#pragma once

#include <optional>
#include <vector>

#include "cablesim/errors.hpp"
#include "cablesim/geometry.hpp"

namespace cablesim {

struct CableParams {
  double total_length = 300.0;     // mm
  int node_count = 60;             // N >= 3
  double bending_stiffness = 50.0; // energy * mm
  double weight_per_length = 0.01; // energy / mm^2

  double segment_length() const { return total_length / (node_count - 1); }
  void validate() const;
};

// Plug end fixed in a socket or magazine slot.
struct PinNode {
  int index = 0;
  Vec3 position;
};

// Cable held by a routing fork after insertion.
struct Clip {
  int index = 0;
  int fork_id = -1;
  Vec3 point;
};

// Loose grip: the cable runs freely through the slightly opened jaws; no
// axial force is transmitted.
struct SlidingGrip {
  double s = 0.0;  // current arc length at the jaws
  double s_min = 0.0;
  double s_max = 0.0;
  Vec3 jaw_point;
  double capture_radius = 4.0;  // mm
  int travel_sign = +1;         // +1: toward the free end
};

// Tight grip: the grasped arc-length point is welded to the gripper frame.
struct TightGrip {
  double s = 0.0;
  Vec3 grip_point;
};

// At most one grip is active; enforced by the two optionals.
struct CableConstraints {
  std::vector<PinNode> pins;
  std::vector<Clip> clips;
  std::optional<SlidingGrip> sliding;
  std::optional<TightGrip> tight;
};

struct CableState {
  std::vector<Vec3> nodes;
  CableConstraints constraints;

  static CableState straight_line(const CableParams& params, const Vec3& from, const Vec3& to);
};

struct SnagReport {
  int node_index = -1;
  int obstacle_id = -1;
  double wrap_angle = 0.0;  // rad, in [0, pi]
  bool blocked = false;
};

struct SolveOptions {
  int max_iterations = 5000;
  double displacement_tol = 1e-4;  // mm
  double length_tol_rel = 1e-7;    // per-segment, relative to segment length
  int projection_sweeps = 200;
  int initial_projection_sweeps = 20000;
};

struct SolveTrace {
  std::vector<double> energies;               // accepted outer iterations
  std::vector<std::vector<Vec3>> node_frames; // filled when capture_nodes
  bool capture_nodes = false;
};

double cable_energy(const CableParams& params, const std::vector<Vec3>& nodes);

// Constrained equilibrium: projected gradient descent on bending + gravity
// with a Gauss-Seidel projection sweep after every step. Throws
// OverstretchError when hard points are farther apart than the connecting
// arc length.
CableState solve_static(const CableParams& params, CableState state,
                        const std::vector<Box3>& obstacles, const SolveOptions& opts = {},
                        SolveTrace* trace = nullptr);

// Position at arc length s by linear interpolation along the polyline.
Vec3 point_at(const CableState& state, double s);

// Arc length of the polyline point nearest to p; optionally reports the
// distance to that point.
double nearest_arc(const CableState& state, const Vec3& p, double* distance = nullptr);

struct SlideResult {
  double s = 0.0;
  double jaw_distance = 0.0;
};

// Advances the sliding grip to the cable point nearest the jaw point,
// monotone in the configured travel direction, then re-solves with the grip
// as a bead-on-wire constraint. Throws CableLostError when the cable escapes
// the jaw gap.
SlideResult slide_grip(const CableParams& params, CableState& state, const Vec3& jaw_point,
                       const std::vector<Box3>& obstacles, const SolveOptions& opts = {});

// Geometric snag test for tight-grip pulls: a contacted node whose wrap
// angle exceeds the threshold blocks the pull when tension would increase
// around that corner.
struct SnagOptions {
  double contact_clearance = 0.5;            // mm
  double wrap_threshold = M_PI / 3.0;        // 60 degrees
};

std::optional<SnagReport> check_snag(const CableParams& params, const CableState& state,
                                     const std::vector<Box3>& obstacles,
                                     const Vec3& pull_direction, const SnagOptions& opts = {});

// Same test with an explicit pull anchor (the welded plug when the cable is
// dragged by its end instead of a gripped mid-point).
std::optional<SnagReport> check_snag_at(const CableParams& params, const CableState& state,
                                        const std::vector<Box3>& obstacles,
                                        const Vec3& pull_direction, const Vec3& pull_anchor,
                                        const SnagOptions& opts = {});

}  // namespace cablesim
