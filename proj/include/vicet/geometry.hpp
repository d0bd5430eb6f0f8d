#pragma once

// Rigid-motion primitives and the 12-state scan model.
//
// Conventions used throughout the library:
//  * rotations are intrinsic roll-pitch-yaw: f(roll, pitch, yaw) =
//    Rz(yaw) * Ry(pitch) * Rx(roll), applied to body-frame vectors;
//  * a scan is parameterised by scaled time s in [0, 1] (fraction of one
//    sweep); the sensor pose at s is the start pose advanced by the lever
//    rule: m(s) = x0 + s*dx, R(s) = f(s*dtheta) * f(theta0);
//  * the state vector orders as [x0, dx, theta0, dtheta].

#include <algorithm>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vicet {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat3x12 = Eigen::Matrix<double, 3, 12>;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct EulerAngles {
  double roll = 0.0;   // about body x
  double pitch = 0.0;  // about body y
  double yaw = 0.0;    // about body z

  Vec3 vec() const { return {roll, pitch, yaw}; }
  static EulerAngles from_vec(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
};

inline Mat3 euler_to_rotation(const EulerAngles& e) {
  const Eigen::AngleAxisd rx(e.roll, Vec3::UnitX());
  const Eigen::AngleAxisd ry(e.pitch, Vec3::UnitY());
  const Eigen::AngleAxisd rz(e.yaw, Vec3::UnitZ());
  return (rz * ry * rx).toRotationMatrix();
}

// Inverse of euler_to_rotation. roll and yaw land in (-pi, pi], pitch in
// [-pi/2, pi/2]. At gimbal lock (|pitch| = pi/2) only roll -/+ yaw is
// determined; the split is fixed by reporting roll = 0.
inline EulerAngles rotation_to_euler(const Mat3& r) {
  EulerAngles e;
  const double sp = std::clamp(-r(2, 0), -1.0, 1.0);
  if (std::abs(sp) > 1.0 - 1e-12) {
    e.pitch = std::copysign(kPi / 2.0, sp);
    e.roll = 0.0;
    // With cos(pitch) = 0 the first row/column collapse; recover yaw from
    // the surviving block (sign of the second term flips with the pitch).
    e.yaw = std::atan2(-r(0, 1), sp > 0 ? r(0, 2) : -r(0, 2));
  } else {
    e.pitch = std::asin(sp);
    e.roll = std::atan2(r(2, 1), r(2, 2));
    e.yaw = std::atan2(r(1, 0), r(0, 0));
  }
  return e;
}

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

// Angle of a rotation matrix in [0, pi].
inline double rotation_angle(const Mat3& r) {
  return std::acos(std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0));
}

struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
  // this after other: (this * other)(p) = this(other(p)).
  Pose compose(const Pose& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
};

// Joint rigid-registration + motion-distortion state: pose of the sensor at
// scan start (x0, theta0) and its change over one sweep (dx, dtheta).
struct StateVector12 {
  Vec3 x0 = Vec3::Zero();
  Vec3 dx = Vec3::Zero();
  EulerAngles theta0;
  EulerAngles dtheta;

  Vec12 vec() const {
    Vec12 v;
    v << x0, dx, theta0.vec(), dtheta.vec();
    return v;
  }

  static StateVector12 from_vec(const Vec12& v) {
    StateVector12 x;
    x.x0 = v.segment<3>(0);
    x.dx = v.segment<3>(3);
    x.theta0 = EulerAngles::from_vec(v.segment<3>(6));
    x.dtheta = EulerAngles::from_vec(v.segment<3>(9));
    return x;
  }

  static StateVector12 rigid(const Vec3& x0, const EulerAngles& theta0) {
    StateVector12 x;
    x.x0 = x0;
    x.theta0 = theta0;
    return x;
  }

  bool is_rigid(double tol = 0.0) const {
    return dx.norm() <= tol && dtheta.vec().norm() <= tol;
  }
};

// Solver updates add in plain coordinates; angles sum component-wise, which
// is the linearised composition the Jacobian below is built for.
inline StateVector12 advance(const StateVector12& x, const Vec12& delta) {
  return StateVector12::from_vec(x.vec() + delta);
}

// Sensor pose at scaled time s under the zero-order-hold motion model.
inline Pose pose_at_time(const StateVector12& x, double s) {
  Pose p;
  p.translation = x.x0 + s * x.dx;
  p.rotation = euler_to_rotation(EulerAngles::from_vec(s * x.dtheta.vec())) *
               euler_to_rotation(x.theta0);
  return p;
}

// Map-frame position of a body-frame point captured at scaled time s.
inline Vec3 apply_state(const Vec3& p_body, double s, const StateVector12& x) {
  return pose_at_time(x, s).apply(p_body);
}

// Derivative of apply_state w.r.t. the 12 states, evaluated at x, in
// left-multiplicative angle-perturbation coordinates (a perturbation d
// moves the point by skew(dtheta0 + s*ddtheta) about the current estimate
// plus dx0 + s*ddx). Block pattern: [I | sI | -P | -sP] with
// P = skew(rotated point) = skew(mu_mapframe - m(s)); the caller passes the
// point already mapped through x so nothing is re-rotated here.
inline Mat3x12 jacobian_block(const Vec3& mu_mapframe, double s,
                              const StateVector12& x) {
  const Vec3 lever = mu_mapframe - (x.x0 + s * x.dx);
  const Mat3 p = skew(lever);
  Mat3x12 h;
  h.block<3, 3>(0, 0) = Mat3::Identity();
  h.block<3, 3>(0, 3) = s * Mat3::Identity();
  h.block<3, 3>(0, 6) = -p;
  h.block<3, 3>(0, 9) = -s * p;
  return h;
}

}  // namespace vicet
