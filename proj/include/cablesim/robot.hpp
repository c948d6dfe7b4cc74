#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cablesim/errors.hpp"
#include "cablesim/geometry.hpp"
#include "cablesim/rng.hpp"

namespace cablesim {

using JointVector = Eigen::VectorXd;

// One classic DH row: flange_i = RotZ(q + theta_offset) TransZ(d) TransX(a) RotX(alpha).
struct DhRow {
  double d = 0.0;      // mm
  double a = 0.0;      // mm
  double alpha = 0.0;  // rad
  double theta_offset = 0.0;
};

struct ArmParams {
  std::vector<DhRow> rows;
  JointVector limit_lower;
  JointVector limit_upper;

  int joint_count() const { return static_cast<int>(rows.size()); }
  double max_reach() const;
  void validate() const;  // n >= 6, lower < upper

  static ArmParams default_seven_dof();
};

enum class CommandMode { PoseInput, JointInput };

// Lateral end-effector error. Per-mode noise is truncated at the mode cap;
// the total lateral deviation (bias + noise) is additionally bounded by
// pose_mode_max, the overall positioning error bound of the arm.
struct ErrorModel {
  double pose_mode_sigma = 0.7;   // mm
  double pose_mode_max = 2.0;     // mm
  double joint_mode_sigma = 0.05; // mm
  double joint_mode_max = 0.3;    // mm
  Vec3 taught_bias{0.0, 0.5, 0.0};

  void validate() const;
};

Vec3 sample_ee_error(const ErrorModel& model, CommandMode mode, Rng& rng);

struct ContactEvent {
  Vec3 position;
  Vec3 contact_normal;       // outward from the obstacle, unit length
  Vec3 commanded_direction;  // unit length
  int object_id = -1;
};

Transform forward_kinematics(const ArmParams& params, const JointVector& q);

struct IkOptions {
  int max_iterations = 500;
  double position_tol = 0.02;    // mm
  double orientation_tol = 2e-4; // rad
};

JointVector inverse_kinematics(const ArmParams& params, const Transform& target,
                               const JointVector& seed, const IkOptions& opts = {});

// A body carried by the TCP; collides with scene obstacles during motion.
struct AttachedBody {
  Box3 local;  // pose relative to the TCP frame
  int id = -1;
};

enum class MoveKind {
  Taught,   // absolute taught goal: noise + taught bias apply
  Relative, // referenced to the current pose: noise only
};

struct MoveResult {
  Transform achieved;
  std::optional<ContactEvent> contact;
  double traveled = 0.0;  // mm
};

// Task-space motion executor for a single arm. Mutable state is the current
// TCP pose and the simulated clock; one instance per concurrent trial.
class Robot {
 public:
  Robot(ArmParams params, ErrorModel errors, Transform base_pose);

  void set_command_mode(CommandMode mode) { mode_ = mode; }
  CommandMode command_mode() const { return mode_; }
  void set_tcp_speed(double mm_per_s);
  void set_step_size(double mm) { step_size_ = mm; }
  void set_pose(const Transform& tcp) { tcp_ = tcp; }

  const Transform& pose() const { return tcp_; }
  double clock_s() const { return clock_s_; }
  void dwell(double seconds) { clock_s_ += seconds; }

  void attach(const AttachedBody& body) { attached_.push_back(body); }
  void detach(int id);
  const std::vector<AttachedBody>& attached() const { return attached_; }

  // Straight-line interpolation from the current pose, stepped; stops at the
  // first contact between an attached body and an obstacle.
  MoveResult move_to(const Transform& target, MoveKind kind,
                     const std::vector<Box3>& obstacles, Rng& rng);

  const ArmParams& params() const { return params_; }
  const ErrorModel& error_model() const { return errors_; }

 private:
  ArmParams params_;
  ErrorModel errors_;
  Transform base_;
  Transform tcp_;
  CommandMode mode_ = CommandMode::JointInput;
  double tcp_speed_ = 100.0;  // mm/s
  double step_size_ = 0.1;    // mm
  double clock_s_ = 0.0;
  std::vector<AttachedBody> attached_;
};

}  // namespace cablesim
