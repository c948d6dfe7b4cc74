#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

namespace cablesim {

// All lengths are millimetres, all angles radians.
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

// Unit quaternion with double-cover-aware comparison (q and -q are the same
// rotation). Construction normalizes.
struct Rotation {
  Quat q{1.0, 0.0, 0.0, 0.0};

  Rotation() = default;
  explicit Rotation(const Quat& raw) : q(raw.normalized()) {}
  Rotation(double w, double x, double y, double z) : Rotation(Quat(w, x, y, z)) {}

  static Rotation identity() { return {}; }
  static Rotation about_x(double a) { return Rotation(Quat(Eigen::AngleAxisd(a, Vec3::UnitX()))); }
  static Rotation about_y(double a) { return Rotation(Quat(Eigen::AngleAxisd(a, Vec3::UnitY()))); }
  static Rotation about_z(double a) { return Rotation(Quat(Eigen::AngleAxisd(a, Vec3::UnitZ()))); }

  // Intrinsic Z-Y-X: yaw about z, then pitch about y, then roll about x.
  static Rotation from_ypr(double yaw, double pitch, double roll) {
    return about_z(yaw) * about_y(pitch) * about_x(roll);
  }

  // Returns (yaw, pitch, roll); pitch clamped to [-pi/2, pi/2].
  Vec3 to_ypr() const {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    const double sp = std::clamp(2.0 * (w * y - x * z), -1.0, 1.0);
    return {std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z)),
            std::asin(sp),
            std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y))};
  }

  Mat3 matrix() const { return q.toRotationMatrix(); }
  Rotation inverse() const { return Rotation(q.conjugate()); }

  Vec3 operator*(const Vec3& v) const { return q * v; }
  Rotation operator*(const Rotation& o) const { return Rotation(q * o.q); }

  // Geodesic angle to another rotation, in [0, pi]; atan2 form stays precise
  // near zero.
  double angle_to(const Rotation& o) const {
    const Quat r = q.conjugate() * o.q;
    return 2.0 * std::atan2(r.vec().norm(), std::abs(r.w()));
  }

  double angle() const { return angle_to(identity()); }
};

// Rigid transform. (a * b) applies b first, then a.
struct Transform {
  Rotation rotation;
  Vec3 translation{0.0, 0.0, 0.0};

  static Transform identity() { return {}; }
  static Transform from_translation(const Vec3& t) { return {Rotation::identity(), t}; }
  static Transform from_rotation(const Rotation& r) { return {r, Vec3::Zero()}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  Transform operator*(const Transform& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }
  Transform inverse() const {
    const Rotation ri = rotation.inverse();
    return {ri, -(ri * translation)};
  }
};

inline Transform compose(const Transform& a, const Transform& b) { return a * b; }

// Oriented box; half_extents must be strictly positive.
struct Box3 {
  Transform pose;
  Vec3 half_extents{1.0, 1.0, 1.0};
  int id = -1;

  Vec3 to_local(const Vec3& p) const { return pose.inverse() * p; }
  Vec3 corner(int i) const {  // i in [0, 8)
    const Vec3 s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    return pose * s.cwiseProduct(half_extents);
  }
};

// Signed distance, negative inside (depth to the nearest face).
inline double distance_point_box(const Vec3& p, const Box3& b) {
  const Vec3 q = b.to_local(p).cwiseAbs() - b.half_extents;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

// Closest point on the box surface and the outward normal there. For interior
// points the nearest face is used.
struct SurfacePoint {
  Vec3 point;
  Vec3 normal;
};

inline SurfacePoint closest_surface_point(const Vec3& p, const Box3& b) {
  Vec3 lp = b.to_local(p);
  const Vec3& h = b.half_extents;
  const Vec3 clamped = lp.cwiseMax(-h).cwiseMin(h);
  if ((lp - clamped).norm() > 0.0) {
    Vec3 n = (lp - clamped).normalized();
    return {b.pose * clamped, b.pose.rotation * n};
  }
  // Interior: push out through the least-penetrated face.
  int axis = 0;
  (h - lp.cwiseAbs()).minCoeff(&axis);
  const double sign = lp[axis] >= 0.0 ? 1.0 : -1.0;
  Vec3 sp = lp;
  sp[axis] = sign * h[axis];
  Vec3 n = Vec3::Zero();
  n[axis] = sign;
  return {b.pose * sp, b.pose.rotation * n};
}

namespace detail {

inline double exterior_distance_local(const Vec3& lp, const Vec3& h) {
  return ((lp.cwiseAbs() - h).cwiseMax(0.0)).norm();
}

// Slab test for a segment against the centered AABB [-h, h]; boundary touch
// counts as intersection.
inline bool segment_intersects_local(const Vec3& a, const Vec3& b, const Vec3& h) {
  double t0 = 0.0, t1 = 1.0;
  const Vec3 d = b - a;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-300) {
      if (a[i] < -h[i] || a[i] > h[i]) return false;
    } else {
      double lo = (-h[i] - a[i]) / d[i];
      double hi = (h[i] - a[i]) / d[i];
      if (lo > hi) std::swap(lo, hi);
      t0 = std::max(t0, lo);
      t1 = std::min(t1, hi);
      if (t0 > t1) return false;
    }
  }
  return true;
}

}  // namespace detail

// Minimum distance from segment [p0, p1] to the box surface; 0 if they
// intersect or touch. The point-to-box distance is convex along the segment,
// so a golden-section scan converges to the global minimum.
inline double segment_box_clearance(const Vec3& p0, const Vec3& p1, const Box3& b) {
  const Transform inv = b.pose.inverse();
  const Vec3 a = inv * p0;
  const Vec3 c = inv * p1;
  const Vec3& h = b.half_extents;
  if (detail::segment_intersects_local(a, c, h)) return 0.0;

  constexpr double kPhi = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double m1 = hi - kPhi * (hi - lo);
  double m2 = lo + kPhi * (hi - lo);
  double f1 = detail::exterior_distance_local(a + m1 * (c - a), h);
  double f2 = detail::exterior_distance_local(a + m2 * (c - a), h);
  for (int it = 0; it < 120; ++it) {
    if (f1 <= f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - kPhi * (hi - lo);
      f1 = detail::exterior_distance_local(a + m1 * (c - a), h);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + kPhi * (hi - lo);
      f2 = detail::exterior_distance_local(a + m2 * (c - a), h);
    }
  }
  const double fe = std::min(detail::exterior_distance_local(a, h),
                             detail::exterior_distance_local(c, h));
  return std::min(fe, std::min(f1, f2));
}

// Exact clearance between two boxes. The closest feature pair of two convex
// boxes is always attained on an edge of one against the other box, so the
// minimum over both edge sets suffices.
inline double box_box_clearance(const Box3& a, const Box3& b) {
  static constexpr int kEdges[12][2] = {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {1, 3},
                                        {4, 6}, {5, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : kEdges) {
    best = std::min(best, segment_box_clearance(a.corner(e[0]), a.corner(e[1]), b));
    if (best == 0.0) return 0.0;
    best = std::min(best, segment_box_clearance(b.corner(e[0]), b.corner(e[1]), a));
    if (best == 0.0) return 0.0;
  }
  return best;
}

inline double wrap_angle(double a) {  // to (-pi, pi]
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

}  // namespace cablesim
