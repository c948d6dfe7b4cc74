#include <cmath>

#include "cablesim/robot.hpp"
#include "doctest.h"

using namespace cablesim;

namespace {

ErrorModel zero_errors() {
  ErrorModel m;
  m.pose_mode_sigma = 0.0;
  m.pose_mode_max = 0.0;
  m.joint_mode_sigma = 0.0;
  m.joint_mode_max = 0.0;
  m.taught_bias = Vec3::Zero();
  return m;
}

}  // namespace

TEST_CASE("forward kinematics trivial chains") {
  ArmParams p;
  p.rows = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
  p.limit_lower = JointVector::Constant(6, -3.0);
  p.limit_upper = JointVector::Constant(6, 3.0);
  const Transform t = forward_kinematics(p, JointVector::Zero(6));
  CHECK(t.translation.norm() == doctest::Approx(0.0));
  CHECK(t.rotation.angle() == doctest::Approx(0.0));
}

TEST_CASE("forward kinematics planar one-link") {
  // 6 joints to satisfy the arm contract; only the first link has length.
  ArmParams p;
  p.rows = {{0, 100, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
  p.limit_lower = JointVector::Constant(6, -3.0);
  p.limit_upper = JointVector::Constant(6, 3.0);
  JointVector q = JointVector::Zero(6);
  q[0] = M_PI / 2;
  const Transform t = forward_kinematics(p, q);
  CHECK(t.translation.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.translation.y() == doctest::Approx(100.0));
  CHECK(t.translation.z() == doctest::Approx(0.0));
  CHECK(t.rotation.to_ypr()[0] == doctest::Approx(M_PI / 2));
}

TEST_CASE("forward kinematics frozen reference pose") {
  // Reference values regenerated by tests/golden/fk_reference.py.
  const ArmParams p = ArmParams::default_seven_dof();
  JointVector q(7);
  q << 0.3, -0.4, 0.25, -1.8, 0.15, 1.9, 0.7;
  const Transform t = forward_kinematics(p, q);
  CHECK(t.translation.x() == doctest::Approx(362.686748312834).epsilon(1e-10));
  CHECK(t.translation.y() == doctest::Approx(271.779783454793).epsilon(1e-10));
  CHECK(t.translation.z() == doctest::Approx(743.850404143581).epsilon(1e-10));
  const Rotation expected(0.162116236903, -0.967015784742, 0.076597250299, -0.180918929464);
  CHECK(t.rotation.angle_to(expected) < 1e-9);
}

TEST_CASE("forward kinematics rejects out-of-limit joints") {
  const ArmParams p = ArmParams::default_seven_dof();
  JointVector q = JointVector::Zero(7);
  q[3] = -1.5;
  q[0] = 5.0;  // beyond +-2.8973
  CHECK_THROWS_AS(forward_kinematics(p, q), JointLimitError);
}

TEST_CASE("inverse kinematics fixed point and local targets") {
  const ArmParams p = ArmParams::default_seven_dof();
  JointVector seed(7);
  seed << 0.3, -0.4, 0.25, -1.8, 0.15, 1.9, 0.7;
  const Transform pose = forward_kinematics(p, seed);

  const JointVector q0 = inverse_kinematics(p, pose, seed);
  CHECK((q0 - seed).norm() < 1e-6);  // already there: zero correction

  Transform above = pose;
  above.translation.z() += 10.0;
  const JointVector q1 = inverse_kinematics(p, above, seed);
  const Transform reached = forward_kinematics(p, q1);
  CHECK((reached.translation - above.translation).norm() < 0.1);
  CHECK(reached.rotation.angle_to(above.rotation) < 1e-3);
}

TEST_CASE("inverse kinematics unreachable target") {
  const ArmParams p = ArmParams::default_seven_dof();
  JointVector seed(7);
  seed << 0.3, -0.4, 0.25, -1.8, 0.15, 1.9, 0.7;
  Transform target = Transform::from_translation({2500.0, 0.0, 0.0});
  CHECK_THROWS_AS(inverse_kinematics(p, target, seed), UnreachableError);
}

TEST_CASE("fk-ik round trip over random reachable targets") {
  const ArmParams p = ArmParams::default_seven_dof();
  Rng rng(2024);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    JointVector q(7);
    for (int j = 0; j < 7; ++j) {
      const double lo = p.limit_lower[j], hi = p.limit_upper[j];
      const double margin = 0.1 * (hi - lo);
      q[j] = rng.uniform(lo + margin, hi - margin);
    }
    const Transform target = forward_kinematics(p, q);
    JointVector seed = q;
    for (int j = 0; j < 7; ++j)
      seed[j] = std::clamp(seed[j] + rng.uniform(-0.2, 0.2), p.limit_lower[j], p.limit_upper[j]);
    const JointVector sol = inverse_kinematics(p, target, seed);
    const Transform reached = forward_kinematics(p, sol);
    CHECK((reached.translation - target.translation).norm() < 0.1);
    CHECK(reached.rotation.angle_to(target.rotation) < 1e-3);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("error sampling: degenerate, truncation, determinism") {
  ErrorModel m;  // defaults
  {
    ErrorModel z = m;
    z.pose_mode_sigma = 0.0;
    z.joint_mode_sigma = 0.0;
    Rng rng(1);
    const Vec3 e1 = sample_ee_error(z, CommandMode::PoseInput, rng);
    const Vec3 e2 = sample_ee_error(z, CommandMode::JointInput, rng);
    CHECK(e1.isApprox(Vec3(0.0, 0.5, 0.0)));
    CHECK(e2.isApprox(Vec3(0.0, 0.5, 0.0)));
  }
  {
    Rng rng(99);
    double max_lateral = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Vec3 e = sample_ee_error(m, CommandMode::PoseInput, rng);
      max_lateral = std::max(max_lateral, e.head<2>().norm());
    }
    CHECK(max_lateral <= 2.0 + 1e-12);
  }
  {
    Rng a(123), b(123);
    const Vec3 ea = sample_ee_error(m, CommandMode::PoseInput, a);
    const Vec3 eb = sample_ee_error(m, CommandMode::PoseInput, b);
    CHECK(ea.isApprox(eb));
  }
}

TEST_CASE("error mode ordering") {
  ErrorModel m;
  Rng rng(5);
  double pose_sum = 0.0, joint_sum = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i)
    pose_sum += sample_ee_error(m, CommandMode::PoseInput, rng).head<2>().norm();
  for (int i = 0; i < n; ++i)
    joint_sum += sample_ee_error(m, CommandMode::JointInput, rng).head<2>().norm();
  CHECK(joint_sum / n < pose_sum / n);
}

TEST_CASE("move_to without noise reaches the target exactly") {
  Robot robot(ArmParams::default_seven_dof(), zero_errors(), Transform::identity());
  robot.set_pose(Transform::from_translation({0, 200, 300}));
  Rng rng(1);
  const Transform target = Transform::from_translation({50, 250, 300});
  const MoveResult res = robot.move_to(target, MoveKind::Taught, {}, rng);
  CHECK_FALSE(res.contact.has_value());
  CHECK((res.achieved.translation - target.translation).norm() < 1e-12);
  CHECK(robot.clock_s() == doctest::Approx(res.traveled / 100.0));
}

TEST_CASE("move_to stops at first contact") {
  Robot robot(ArmParams::default_seven_dof(), zero_errors(), Transform::identity());
  robot.set_pose(Transform::from_translation({0, 300, 0}));
  Box3 body;
  body.half_extents = {1, 1, 1};
  robot.attach({body, 1});

  Box3 wall;
  wall.half_extents = {5, 50, 50};
  wall.pose.translation = {14, 300, 0};  // near face at x = 9
  wall.id = 7;

  Rng rng(1);
  const Transform target = Transform::from_translation({20, 300, 0});
  const MoveResult res = robot.move_to(target, MoveKind::Taught, {wall}, rng);
  REQUIRE(res.contact.has_value());
  // body +x face meets the wall after 8 mm of travel
  CHECK(res.achieved.translation.x() == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(res.contact->object_id == 7);
  CHECK(res.contact->contact_normal.dot(res.contact->commanded_direction) < 0.0);
  // no penetration after the clamped stop
  Box3 placed = body;
  placed.pose = res.achieved;
  CHECK(box_box_clearance(placed, wall) >= 0.0);
}

TEST_CASE("simulated clock is additive over segments") {
  Robot robot(ArmParams::default_seven_dof(), zero_errors(), Transform::identity());
  robot.set_pose(Transform::from_translation({0, 300, 0}));
  Rng rng(1);
  robot.move_to(Transform::from_translation({30, 300, 0}), MoveKind::Taught, {}, rng);
  const double t1 = robot.clock_s();
  robot.move_to(Transform::from_translation({30, 340, 0}), MoveKind::Taught, {}, rng);
  const double t2 = robot.clock_s();
  CHECK(t1 == doctest::Approx(0.3));
  CHECK(t2 - t1 == doctest::Approx(0.4));
}

TEST_CASE("error model validation") {
  ErrorModel m;
  m.pose_mode_max = 0.1;  // below sigma
  CHECK_THROWS_AS(m.validate(), ConfigError);
  ErrorModel b;
  b.taught_bias = {0.0, 5.0, 0.0};  // beyond the total cap
  CHECK_THROWS_AS(b.validate(), ConfigError);
}
