#pragma once

// Shared scene and scan builders for the simulator-driven suites.

#include <random>
#include <vector>

#include "vicet/cloud.hpp"
#include "vicet/geometry.hpp"
#include "vicet/simulator.hpp"

namespace support {

using namespace vicet;

// Forward model under a 12-dim perturbation d of a state estimate, with the
// angle blocks applied as a left-multiplied rotation of the interpolated
// attitude — the coordinates jacobian_block differentiates in. Central
// differences of this function are the independent oracle for every
// Jacobian check in the suite.
inline Vec3 perturbed_forward(const StateVector12& x, const Vec3& p, double s,
                              const Vec12& d) {
  const Pose pose = pose_at_time(x, s);
  const Vec3 dang = d.segment<3>(6) + s * d.segment<3>(9);
  const Mat3 r = euler_to_rotation(EulerAngles::from_vec(dang)) * pose.rotation;
  const Vec3 m = pose.translation + d.segment<3>(0) + s * d.segment<3>(3);
  return r * p + m;
}

// 10 x 10 x 5 m room with two off-center box obstacles so the scene has
// features beyond four walls (corners and edges anchor rotation/range).
inline RoomScene demo_room() {
  RoomScene scene;
  scene.half_extents = Vec3(5.0, 5.0, 2.5);
  scene.obstacles.push_back({Vec3(2.5, 1.5, -0.5), Vec3(0.5, 0.4, 0.8)});
  scene.obstacles.push_back({Vec3(-2.0, -2.5, 0.0), Vec3(0.3, 0.6, 1.0)});
  return scene;
}

// Constant-velocity forward sweep: the platform advances dist metres along
// map x over one revolution, starting from the given pose.
inline StateVector12 forward_motion(double dist, const Vec3& start = Vec3::Zero(),
                                    double yaw = 0.0) {
  StateVector12 x;
  x.x0 = start;
  x.theta0 = {0.0, 0.0, yaw};
  x.dx = Vec3(dist, 0.0, 0.0);
  return x;
}

// Undistorted reference map of the demo room from two vantage poses.
inline PointCloud demo_map(const RoomScene& scene,
                           const BeamPattern& pattern = BeamPattern::default_pattern()) {
  return simulate_map(scene, pattern,
                      {StateVector12::rigid(Vec3(0.0, 0.0, 0.0), {}),
                       StateVector12::rigid(Vec3(1.0, -0.8, 0.3), {})});
}

// Beam pattern whose rays never sit on a default-grid cell edge: 367 azimuth
// steps share no edge with 36 bins (367 is prime), and the elevation rings
// avoid the 4.5-degree bin-edge lattice. With the stock pattern every tenth
// azimuth column lies exactly on a bin edge and flips cells on fp noise,
// which puts a ~1e-6 floor under any fixed-point comparison.
inline BeamPattern edge_free_pattern() {
  BeamPattern p;
  p.azimuth_steps = 367;
  p.elevation_angles.clear();
  for (int i = 0; i < 16; ++i)
    p.elevation_angles.push_back(deg_to_rad(-29.71 + 2.93 * i));
  return p;
}

}  // namespace support
