#include "vicet/geometry.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

using namespace vicet;

namespace {

// Independent closed-form for Rz(yaw)*Ry(pitch)*Rx(roll), written out by
// hand so euler_to_rotation is checked against something other than itself.
Mat3 rpy_matrix(double roll, double pitch, double yaw) {
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  Mat3 m;
  m << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp, cp * sr, cp * cr;
  return m;
}

EulerAngles random_angles(std::mt19937& rng, double pitch_limit = 1.4) {
  std::uniform_real_distribution<double> full(-kPi, kPi);
  std::uniform_real_distribution<double> pitch(-pitch_limit, pitch_limit);
  return {full(rng), pitch(rng), full(rng)};
}

StateVector12 random_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> ang(-0.6, 0.6);
  StateVector12 x;
  x.x0 = Vec3(pos(rng), pos(rng), pos(rng));
  x.dx = Vec3(pos(rng), pos(rng), pos(rng)) * 0.3;
  x.theta0 = {ang(rng), ang(rng), ang(rng)};
  x.dtheta = {ang(rng) * 0.3, ang(rng) * 0.3, ang(rng) * 0.3};
  return x;
}

}  // namespace

TEST(EulerToRotation, IdentityAtZero) {
  EXPECT_LT((euler_to_rotation({0, 0, 0}) - Mat3::Identity()).norm(), 1e-15);
}

TEST(EulerToRotation, HalfTurnAboutX) {
  Mat3 expected;
  expected << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  EXPECT_LT((euler_to_rotation({kPi, 0, 0}) - expected).norm(), 1e-12);
}

TEST(EulerToRotation, MatchesClosedForm) {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    const EulerAngles e = random_angles(rng, kPi);
    const Mat3 r = euler_to_rotation(e);
    EXPECT_LT((r - rpy_matrix(e.roll, e.pitch, e.yaw)).norm(), 1e-13);
  }
}

TEST(EulerToRotation, ProducesProperRotations) {
  std::mt19937 rng(8);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = euler_to_rotation(random_angles(rng, kPi));
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(RotationToEuler, RoundTripsThroughMatrices) {
  std::mt19937 rng(9);
  for (int i = 0; i < 500; ++i) {
    const Mat3 r = euler_to_rotation(random_angles(rng));
    const EulerAngles e = rotation_to_euler(r);
    EXPECT_LT((euler_to_rotation(e) - r).norm(), 1e-10);
    EXPECT_GE(e.pitch, -kPi / 2);
    EXPECT_LE(e.pitch, kPi / 2);
    EXPECT_LE(std::abs(e.roll), kPi);
    EXPECT_LE(std::abs(e.yaw), kPi);
  }
}

TEST(RotationToEuler, CanonicalAnglesRoundTripExactly) {
  // Inside the canonical ranges the angles themselves must come back.
  const EulerAngles e{0.3, -0.7, 2.5};
  const EulerAngles back = rotation_to_euler(euler_to_rotation(e));
  EXPECT_NEAR(back.roll, e.roll, 1e-12);
  EXPECT_NEAR(back.pitch, e.pitch, 1e-12);
  EXPECT_NEAR(back.yaw, e.yaw, 1e-12);
}

TEST(RotationToEuler, GimbalLockRecovery) {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> full(-kPi, kPi);
  for (double sign : {1.0, -1.0}) {
    for (int i = 0; i < 50; ++i) {
      const Mat3 r = euler_to_rotation({full(rng), sign * kPi / 2, full(rng)});
      const EulerAngles e = rotation_to_euler(r);
      EXPECT_EQ(e.roll, 0.0);  // convention: roll folds into yaw at the pole
      EXPECT_LT((euler_to_rotation(e) - r).norm(), 1e-10);
    }
  }
}

TEST(Skew, MatchesCrossProduct) {
  Mat3 expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_EQ((skew({1, 2, 3}) - expected).norm(), 0.0);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v(u(rng), u(rng), u(rng)), w(u(rng), u(rng), u(rng));
    EXPECT_LT((skew(v) * w - v.cross(w)).norm(), 1e-12);
    EXPECT_EQ((skew(v) + skew(v).transpose()).norm(), 0.0);
  }
}

TEST(RotationAngle, KnownAngles) {
  EXPECT_NEAR(rotation_angle(Mat3::Identity()), 0.0, 1e-12);
  EXPECT_NEAR(rotation_angle(euler_to_rotation({0, 0, 0.5})), 0.5, 1e-12);
  EXPECT_NEAR(rotation_angle(euler_to_rotation({kPi, 0, 0})), kPi, 1e-7);
}

TEST(StateVector, VectorRoundTrip) {
  std::mt19937 rng(12);
  const StateVector12 x = random_state(rng);
  const StateVector12 back = StateVector12::from_vec(x.vec());
  EXPECT_EQ((back.vec() - x.vec()).norm(), 0.0);

  Vec12 delta = Vec12::Zero();
  delta[4] = 0.25;
  EXPECT_NEAR(advance(x, delta).dx.y(), x.dx.y() + 0.25, 1e-15);
}

TEST(PoseAtTime, LeverRule) {
  StateVector12 x;
  x.x0 = Vec3(1, 2, 3);
  x.dx = Vec3(0.4, 0, -0.2);
  EXPECT_LT((pose_at_time(x, 0.0).translation - Vec3(1, 2, 3)).norm(), 1e-15);
  EXPECT_LT((pose_at_time(x, 0.5).translation - Vec3(1.2, 2, 2.9)).norm(), 1e-15);
  EXPECT_LT((pose_at_time(x, 1.0).translation - Vec3(1.4, 2, 2.8)).norm(), 1e-15);
}

TEST(PoseAtTime, StartAndEndRotations) {
  StateVector12 x;
  x.theta0 = {0.1, -0.2, 0.3};
  x.dtheta = {0, 0, 0.2};
  const Mat3 r0 = pose_at_time(x, 0.0).rotation;
  EXPECT_LT((r0 - euler_to_rotation(x.theta0)).norm(), 1e-14);
  // Over the full sweep the start pose is advanced by exactly f(dtheta).
  const Mat3 r1 = pose_at_time(x, 1.0).rotation;
  EXPECT_LT((r1 * r0.transpose() - euler_to_rotation(x.dtheta)).norm(), 1e-13);
}

TEST(PoseAtTime, EndpointCompositionHoldsForRandomStates) {
  std::mt19937 rng(13);
  for (int i = 0; i < 100; ++i) {
    const StateVector12 x = random_state(rng);
    const Mat3 r0 = pose_at_time(x, 0.0).rotation;
    const Mat3 r1 = pose_at_time(x, 1.0).rotation;
    EXPECT_LT((r1 * r0.transpose() - euler_to_rotation(x.dtheta)).norm(), 1e-12);
  }
}

TEST(ApplyState, PureTranslation) {
  StateVector12 x;
  x.x0 = Vec3(5, 0, 0);
  x.dx = Vec3(1, 0, 0);
  EXPECT_LT((apply_state({0, 2, 0}, 0.5, x) - Vec3(5.5, 2, 0)).norm(), 1e-15);
}

TEST(JacobianBlock, PatternAtKnownTimes) {
  std::mt19937 rng(14);
  const StateVector12 x = random_state(rng);
  const Vec3 mu(3, -1, 2);
  for (double s : {0.0, 0.25, 1.0}) {
    const Mat3x12 h = jacobian_block(mu, s, x);
    const Mat3 p = skew(mu - (x.x0 + s * x.dx));
    EXPECT_EQ((h.block<3, 3>(0, 0) - Mat3::Identity()).norm(), 0.0);
    EXPECT_EQ((h.block<3, 3>(0, 3) - s * Mat3::Identity()).norm(), 0.0);
    EXPECT_EQ((h.block<3, 3>(0, 6) + p).norm(), 0.0);
    EXPECT_EQ((h.block<3, 3>(0, 9) + s * p).norm(), 0.0);
  }
}

namespace {

// Forward model under a 12-dim perturbation d of the state estimate, with
// angles perturbed as a left-multiplied rotation of the interpolated
// attitude (the coordinates jacobian_block differentiates in): the
// perturbation rotation at time s is f(dtheta0 + s*ddtheta) applied on the
// map side, translations follow the lever rule.
Vec3 perturbed_forward(const StateVector12& x, const Vec3& p, double s,
                       const Vec12& d) {
  const Pose pose = pose_at_time(x, s);
  const Vec3 dang = d.segment<3>(6) + s * d.segment<3>(9);
  const Mat3 r = euler_to_rotation(EulerAngles::from_vec(dang)) * pose.rotation;
  const Vec3 m = pose.translation + d.segment<3>(0) + s * d.segment<3>(3);
  return r * p + m;
}

}  // namespace

TEST(JacobianBlock, MatchesCentralDifferences) {
  std::mt19937 rng(15);
  std::uniform_real_distribution<double> su(0.0, 1.0);
  std::uniform_real_distribution<double> pu(-8.0, 8.0);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector12 x = random_state(rng);
    const double s = su(rng);
    const Vec3 p_body(pu(rng), pu(rng), pu(rng));
    const Vec3 mapped = apply_state(p_body, s, x);
    const Mat3x12 jac = jacobian_block(mapped, s, x);
    for (int i = 0; i < 12; ++i) {
      Vec12 d = Vec12::Zero();
      d[i] = h;
      const Vec3 plus = perturbed_forward(x, p_body, s, d);
      d[i] = -h;
      const Vec3 minus = perturbed_forward(x, p_body, s, d);
      const Vec3 fd = (plus - minus) / (2.0 * h);
      EXPECT_LT((fd - jac.col(i)).norm(), 1e-6)
          << "column " << i << " trial " << trial;
    }
  }
}

TEST(JacobianBlock, PlainAdditionDifferencesAgreeAtZeroAttitude) {
  // With both attitude states at zero, perturbing the raw state components
  // is the same (to first order) as the left-multiplicative convention, so
  // finite differences of apply_state itself must match too.
  std::mt19937 rng(16);
  std::uniform_real_distribution<double> pu(-8.0, 8.0);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    StateVector12 x = random_state(rng);
    x.theta0 = {};
    x.dtheta = {};
    const double s = 0.5 * (trial % 3);  // hits 0, 0.5, 1
    const Vec3 p_body(pu(rng), pu(rng), pu(rng));
    const Vec3 mapped = apply_state(p_body, s, x);
    const Mat3x12 jac = jacobian_block(mapped, s, x);
    for (int i = 0; i < 12; ++i) {
      Vec12 d = Vec12::Zero();
      d[i] = h;
      const Vec3 plus = apply_state(p_body, s, advance(x, d));
      d[i] = -h;
      const Vec3 minus = apply_state(p_body, s, advance(x, d));
      EXPECT_LT(((plus - minus) / (2.0 * h) - jac.col(i)).norm(), 1e-6);
    }
  }
}

TEST(JacobianBlock, LinearisationRemainderIsSecondOrder) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> du(-1.0, 1.0);
  const StateVector12 x = random_state(rng);
  const Vec3 p_body(4.0, -2.0, 1.0);
  const double s = 0.7;
  const Vec3 mapped = apply_state(p_body, s, x);
  const Mat3x12 jac = jacobian_block(mapped, s, x);

  Vec12 dir;
  for (int i = 0; i < 12; ++i) dir[i] = du(rng);
  dir.normalize();

  double prev_remainder = -1.0;
  for (double scale : {1e-2, 5e-3, 2.5e-3}) {
    const Vec12 d = scale * dir;
    const Vec3 exact = perturbed_forward(x, p_body, s, d);
    const double remainder = (exact - (mapped + jac * d)).norm();
    EXPECT_LT(remainder, 10.0 * scale * scale);
    if (prev_remainder >= 0.0) {
      EXPECT_LT(remainder, prev_remainder / 2.0);  // shrinks ~quadratically
    }
    prev_remainder = remainder;
  }
}

TEST(Pose, InverseAndCompose) {
  std::mt19937 rng(18);
  const StateVector12 x = random_state(rng);
  const Pose a = pose_at_time(x, 0.3);
  const Pose b = pose_at_time(x, 0.9);
  const Vec3 p(1, 2, 3);
  EXPECT_LT((a.inverse().apply(a.apply(p)) - p).norm(), 1e-12);
  EXPECT_LT((a.compose(b).apply(p) - a.apply(b.apply(p))).norm(), 1e-12);
}
