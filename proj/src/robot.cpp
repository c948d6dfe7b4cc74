#include "cablesim/robot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cablesim {

double ArmParams::max_reach() const {
  double r = 0.0;
  for (const auto& row : rows) r += std::abs(row.d) + std::abs(row.a);
  return r;
}

void ArmParams::validate() const {
  if (joint_count() < 6) throw ConfigError("arm needs at least 6 joints for general poses");
  if (limit_lower.size() != joint_count() || limit_upper.size() != joint_count())
    throw ConfigError("joint limit vectors must match joint count");
  for (int i = 0; i < joint_count(); ++i) {
    if (!(limit_lower[i] < limit_upper[i]))
      throw ConfigError("joint " + std::to_string(i) + ": lower limit must be below upper");
  }
}

ArmParams ArmParams::default_seven_dof() {
  ArmParams p;
  const double hp = M_PI / 2.0;
  p.rows = {{333.0, 0.0, -hp, 0.0}, {0.0, 0.0, hp, 0.0},   {316.0, 82.5, hp, 0.0},
            {0.0, -82.5, -hp, 0.0}, {384.0, 0.0, hp, 0.0}, {0.0, 88.0, hp, 0.0},
            {107.0, 0.0, 0.0, 0.0}};
  p.limit_lower.resize(7);
  p.limit_upper.resize(7);
  p.limit_lower << -2.8973, -1.7628, -2.8973, -3.0718, -2.8973, -0.0175, -2.8973;
  p.limit_upper << 2.8973, 1.7628, 2.8973, -0.0698, 2.8973, 3.7525, 2.8973;
  return p;
}

void ErrorModel::validate() const {
  if (pose_mode_sigma < 0.0 || joint_mode_sigma < 0.0) throw ConfigError("error sigma must be >= 0");
  if (pose_mode_max < pose_mode_sigma) throw ConfigError("pose_mode_max must be >= pose_mode_sigma");
  if (joint_mode_max < joint_mode_sigma)
    throw ConfigError("joint_mode_max must be >= joint_mode_sigma");
  if (taught_bias.head<2>().norm() > pose_mode_max)
    throw ConfigError("lateral taught_bias exceeds pose_mode_max; error model infeasible");
}

Vec3 sample_ee_error(const ErrorModel& model, CommandMode mode, Rng& rng) {
  const double sigma = mode == CommandMode::PoseInput ? model.pose_mode_sigma : model.joint_mode_sigma;
  const double cap = mode == CommandMode::PoseInput ? model.pose_mode_max : model.joint_mode_max;
  for (;;) {
    const Vec3 noise(sigma * rng.gaussian(), sigma * rng.gaussian(), 0.0);
    if (noise.head<2>().norm() > cap) continue;
    const Vec3 total = model.taught_bias + noise;
    if (total.head<2>().norm() > model.pose_mode_max) continue;
    return total;
  }
}

namespace {

Transform dh_transform(const DhRow& row, double q) {
  const double theta = q + row.theta_offset;
  return Transform::from_rotation(Rotation::about_z(theta)) *
         Transform::from_translation({0.0, 0.0, row.d}) *
         Transform::from_translation({row.a, 0.0, 0.0}) *
         Transform::from_rotation(Rotation::about_x(row.alpha));
}

void check_limits(const ArmParams& params, const JointVector& q) {
  if (q.size() != params.joint_count()) throw JointLimitError("joint vector size mismatch");
  for (int i = 0; i < params.joint_count(); ++i) {
    if (q[i] < params.limit_lower[i] - 1e-12 || q[i] > params.limit_upper[i] + 1e-12)
      throw JointLimitError("joint " + std::to_string(i) + " outside limits");
  }
}

}  // namespace

Transform forward_kinematics(const ArmParams& params, const JointVector& q) {
  check_limits(params, q);
  Transform t = Transform::identity();
  for (int i = 0; i < params.joint_count(); ++i) t = t * dh_transform(params.rows[i], q[i]);
  return t;
}

JointVector inverse_kinematics(const ArmParams& params, const Transform& target,
                               const JointVector& seed, const IkOptions& opts) {
  check_limits(params, seed);
  const int n = params.joint_count();
  const double rot_weight = 250.0;  // mm per rad, balances the twist residual
  const double lambda2 = 30.0 * 30.0;

  JointVector q = seed;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    // Chain of partial products; joint i turns about the z axis of frame i-1.
    std::vector<Transform> frames(n + 1);
    frames[0] = Transform::identity();
    for (int i = 0; i < n; ++i) frames[i + 1] = frames[i] * dh_transform(params.rows[i], q[i]);
    const Transform& flange = frames[n];

    const Vec3 pos_err = target.translation - flange.translation;
    const Rotation rot_err = target.rotation * flange.rotation.inverse();
    Eigen::AngleAxisd aa(rot_err.q);
    const Vec3 rot_vec = aa.angle() * aa.axis();

    if (pos_err.norm() < opts.position_tol && rot_err.angle() < opts.orientation_tol) return q;

    Eigen::Matrix<double, 6, Eigen::Dynamic> jac(6, n);
    for (int i = 0; i < n; ++i) {
      const Vec3 z = frames[i].rotation * Vec3::UnitZ();
      jac.col(i).head<3>() = z.cross(flange.translation - frames[i].translation);
      jac.col(i).tail<3>() = rot_weight * z;
    }

    Eigen::Matrix<double, 6, 1> err;
    err.head<3>() = pos_err;
    err.tail<3>() = rot_weight * rot_vec;

    const Eigen::Matrix<double, 6, 6> jjt =
        jac * jac.transpose() + lambda2 * Eigen::Matrix<double, 6, 6>::Identity();
    JointVector dq = jac.transpose() * jjt.ldlt().solve(err);

    const double dq_norm = dq.norm();
    if (dq_norm > 0.3) dq *= 0.3 / dq_norm;
    q += dq;
    for (int i = 0; i < n; ++i) q[i] = std::clamp(q[i], params.limit_lower[i], params.limit_upper[i]);
  }
  throw UnreachableError("inverse kinematics did not converge");
}

Robot::Robot(ArmParams params, ErrorModel errors, Transform base_pose)
    : params_(std::move(params)), errors_(errors), base_(base_pose), tcp_(base_pose) {
  params_.validate();
  errors_.validate();
}

void Robot::set_tcp_speed(double mm_per_s) {
  if (mm_per_s <= 0.0) throw ConfigError("tcp speed must be positive");
  tcp_speed_ = mm_per_s;
}

void Robot::detach(int id) {
  std::erase_if(attached_, [id](const AttachedBody& b) { return b.id == id; });
}

namespace {

struct ClearanceCache {
  // Distance bound per (body, obstacle) pair; exact queries are skipped while
  // the 1-Lipschitz bound stays positive.
  std::vector<double> remaining;
};

double pair_clearance(const AttachedBody& body, const Transform& tcp, const Box3& obstacle) {
  Box3 world = body.local;
  world.pose = tcp * body.local.pose;
  return box_box_clearance(world, obstacle);
}

}  // namespace

MoveResult Robot::move_to(const Transform& target, MoveKind kind,
                          const std::vector<Box3>& obstacles, Rng& rng) {
  Vec3 error = sample_ee_error(errors_, mode_, rng);
  if (kind == MoveKind::Relative) error -= errors_.taught_bias;

  Transform goal = target;
  goal.translation += error;

  if ((goal.translation - base_.translation).norm() > params_.max_reach())
    throw UnreachableError("target beyond arm reach");

  const Vec3 start = tcp_.translation;
  const Vec3 delta = goal.translation - start;
  const double length = delta.norm();
  const Rotation start_rot = tcp_.rotation;

  auto pose_at = [&](double t) {
    Transform p;
    p.translation = start + t * delta;
    p.rotation = Rotation(start_rot.q.slerp(t, goal.rotation.q));
    return p;
  };
  auto min_clearance = [&](double t) {
    const Transform p = pose_at(t);
    double best = std::numeric_limits<double>::infinity();
    int best_id = -1;
    for (const auto& body : attached_) {
      for (const auto& obs : obstacles) {
        const double c = pair_clearance(body, p, obs);
        if (c < best) {
          best = c;
          best_id = obs.id;
        }
      }
    }
    return std::pair<double, int>(best, best_id);
  };

  MoveResult result;
  if (length < 1e-12 || attached_.empty() || obstacles.empty()) {
    tcp_ = pose_at(1.0);
    clock_s_ += length / tcp_speed_;
    result.achieved = tcp_;
    result.traveled = length;
    return result;
  }

  const int steps = std::max(1, static_cast<int>(std::ceil(length / step_size_)));
  double last_free_t = 0.0;
  double hit_t = -1.0;
  int hit_id = -1;
  double budget = min_clearance(0.0).first;  // Lipschitz slack before the next exact query
  for (int k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const double advanced = (t - last_free_t) * length;
    if (advanced < budget - 1e-9) continue;
    const auto [c, id] = min_clearance(t);
    if (c <= 0.0) {
      hit_t = t;
      hit_id = id;
      break;
    }
    last_free_t = t;
    budget = c;
  }

  if (hit_t < 0.0) {
    tcp_ = pose_at(1.0);
    clock_s_ += length / tcp_speed_;
    result.achieved = tcp_;
    result.traveled = length;
    return result;
  }

  // Bisect to the touch instant; keep the last strictly-clear parameter.
  double lo = last_free_t, hi = hit_t;
  for (int it = 0; it < 80 && (hi - lo) * length > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (min_clearance(mid).first > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  tcp_ = pose_at(lo);
  const double traveled = lo * length;
  clock_s_ += traveled / tcp_speed_;

  // Locate the touching pair for the event report.
  ContactEvent ev;
  ev.object_id = hit_id;
  ev.commanded_direction = delta / length;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& body : attached_) {
    Box3 world = body.local;
    world.pose = tcp_ * body.local.pose;
    for (const auto& obs : obstacles) {
      for (int ci = 0; ci < 8; ++ci) {
        const Vec3 corner = world.corner(ci);
        const double d = distance_point_box(corner, obs);
        if (d < best) {
          best = d;
          const SurfacePoint sp = closest_surface_point(corner, obs);
          ev.position = sp.point;
          ev.contact_normal = sp.normal;
          ev.object_id = obs.id;
        }
      }
    }
  }
  result.achieved = tcp_;
  result.contact = ev;
  result.traveled = traveled;
  return result;
}

}  // namespace cablesim
