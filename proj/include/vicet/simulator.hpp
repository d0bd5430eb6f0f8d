#pragma once

// Ray-casting LIDAR simulator for axis-aligned box rooms. The sensor sweeps
// one full revolution per scan while moving along the zero-order-hold
// trajectory of a StateVector12, so every generated cloud has exact ground
// truth: unwarping a scan with its true state puts every point back on a
// scene surface to machine precision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "vicet/cloud.hpp"
#include "vicet/errors.hpp"
#include "vicet/geometry.hpp"

namespace vicet {

struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Zero();
};

// Rectangular room centred at the map origin, walls looking inward, plus
// optional solid box obstacles inside it.
struct RoomScene {
  Vec3 half_extents = Vec3(5.0, 5.0, 2.5);
  std::vector<Box> obstacles;
};

struct BeamPattern {
  int azimuth_steps = 360;
  std::vector<double> elevation_angles;  // radians, need not be sorted

  // 360 azimuth steps x 16 evenly spaced elevation rings in [-30, +15] deg.
  static BeamPattern default_pattern() {
    BeamPattern p;
    const double lo = deg_to_rad(-30.0), hi = deg_to_rad(15.0);
    for (int i = 0; i < 16; ++i)
      p.elevation_angles.push_back(lo + (hi - lo) * i / 15.0);
    return p;
  }
};

// isotropic jitters the returned point in all three axes; range perturbs
// the measured distance along the beam, leaving the beam angles exact.
enum class NoiseModel { isotropic, range };

struct SimulationOptions {
  double noise_sigma = 0.0;  // Gaussian sigma, metres, 0 disables
  NoiseModel noise_model = NoiseModel::isotropic;
  uint32_t seed = 0;
};

namespace detail {

inline constexpr double kRayTol = 1e-12;

// Nearest surface hit of the ray o + t*d (t > tol) against the scene:
// exit through a room wall or entry into an obstacle, whichever is closer.
// Returns infinity when nothing is hit (origin outside the room).
inline double scene_ray_range(const RoomScene& scene, const Vec3& o,
                              const Vec3& d) {
  double best = std::numeric_limits<double>::infinity();

  // Room: the ray leaves through whichever slab it exits first.
  double t_exit = std::numeric_limits<double>::infinity();
  bool inside = true;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(o[i]) > scene.half_extents[i] + kRayTol) inside = false;
    if (std::abs(d[i]) > kRayTol) {
      const double wall = d[i] > 0 ? scene.half_extents[i] : -scene.half_extents[i];
      t_exit = std::min(t_exit, (wall - o[i]) / d[i]);
    }
  }
  if (inside && t_exit > kRayTol) best = t_exit;

  // Obstacles: slab-method entry point, seen from outside the box.
  for (const Box& b : scene.obstacles) {
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    bool miss = false;
    for (int i = 0; i < 3; ++i) {
      const double lo = b.center[i] - b.half_extents[i];
      const double hi = b.center[i] + b.half_extents[i];
      if (std::abs(d[i]) <= kRayTol) {
        if (o[i] < lo || o[i] > hi) { miss = true; break; }
        continue;
      }
      double t0 = (lo - o[i]) / d[i];
      double t1 = (hi - o[i]) / d[i];
      if (t0 > t1) std::swap(t0, t1);
      t_near = std::max(t_near, t0);
      t_far = std::min(t_far, t1);
    }
    if (!miss && t_near <= t_far && t_near > kRayTol)
      best = std::min(best, t_near);
  }
  return best;
}

// Unsigned distance from p to the surface of a box (inside or outside).
inline double box_surface_distance(const Vec3& p, const Vec3& center,
                                   const Vec3& half) {
  const Vec3 q = (p - center).cwiseAbs() - half;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return std::abs(outside + inside);
}

inline bool strictly_inside(const Vec3& p, const Vec3& center,
                            const Vec3& half, double margin) {
  return ((p - center).cwiseAbs().array() < (half.array() - margin)).all();
}

}  // namespace detail

// Distance of each point to its nearest scene surface. Zero for a perfect,
// undistorted (or correctly unwarped) map-frame cloud.
inline std::vector<double> plane_residuals(const PointCloud& cloud,
                                           const RoomScene& scene) {
  std::vector<double> out;
  out.reserve(cloud.size());
  for (const Point& p : cloud.points) {
    double d = detail::box_surface_distance(p.position, Vec3::Zero(),
                                            scene.half_extents);
    for (const Box& b : scene.obstacles)
      d = std::min(d, detail::box_surface_distance(p.position, b.center,
                                                   b.half_extents));
    out.push_back(d);
  }
  return out;
}

// One distorted sweep from the trajectory described by x_true. Beams fire
// in azimuth order (azimuth 2*pi*s in the instantaneous body frame), each
// elevation ring at every step; points come back in the body frame of their
// own capture instant, sorted by (s, elevation).
inline PointCloud simulate_scan(const RoomScene& scene,
                                const StateVector12& x_true,
                                const BeamPattern& pattern,
                                const SimulationOptions& options = {}) {
  if (pattern.azimuth_steps < 8)
    throw DataError("beam pattern needs at least 8 azimuth steps");
  if (pattern.elevation_angles.empty())
    throw DataError("beam pattern needs at least one elevation ring");
  for (double e : pattern.elevation_angles)
    if (!(e > -kPi / 2.0 && e < kPi / 2.0))
      throw DataError("elevation angles must lie strictly between -90 and +90 degrees");
  if ((scene.half_extents.array() <= 0.0).any())
    throw DataError("room must have positive extent on every axis");

  // The model only makes sense while the sensor stays inside the room and
  // clear of the obstacles; check along the whole sweep.
  for (int k = 0; k <= 20; ++k) {
    const Vec3 m = pose_at_time(x_true, k / 20.0).translation;
    if (!detail::strictly_inside(m, Vec3::Zero(), scene.half_extents, 1e-9))
      throw DataError("trajectory leaves the room");
    for (const Box& b : scene.obstacles)
      if (detail::strictly_inside(m, b.center, b.half_extents, -1e-9))
        throw DataError("trajectory passes through an obstacle");
  }

  std::vector<double> elevations = pattern.elevation_angles;
  std::sort(elevations.begin(), elevations.end());

  std::mt19937 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  PointCloud cloud;
  cloud.points.reserve(static_cast<size_t>(pattern.azimuth_steps) *
                       elevations.size());
  for (int k = 0; k < pattern.azimuth_steps; ++k) {
    const double s = static_cast<double>(k) / pattern.azimuth_steps;
    const double azimuth = 2.0 * kPi * s;
    const Pose pose = pose_at_time(x_true, s);
    for (const double elevation : elevations) {
      const Vec3 d_body(std::cos(elevation) * std::cos(azimuth),
                        std::cos(elevation) * std::sin(azimuth),
                        std::sin(elevation));
      const Vec3 d_world = pose.rotation * d_body;
      const double range =
          detail::scene_ray_range(scene, pose.translation, d_world);
      if (!std::isfinite(range)) continue;
      Vec3 p_body = range * d_body;
      if (options.noise_sigma > 0.0) {
        if (options.noise_model == NoiseModel::range)
          p_body = (range + options.noise_sigma * gauss(rng)) * d_body;
        else
          p_body += options.noise_sigma *
                    Vec3(gauss(rng), gauss(rng), gauss(rng));
      }
      cloud.points.push_back({p_body, s});
    }
  }
  if (cloud.empty()) throw DataError("simulated scan came out empty");
  return cloud;
}

// Undistorted map cloud: one rigid scan per pose (change states must be
// zero), unwarped into the map frame and merged. Map points carry s = 0.
inline PointCloud simulate_map(const RoomScene& scene,
                               const BeamPattern& pattern,
                               const std::vector<StateVector12>& poses) {
  if (poses.empty()) throw DataError("map needs at least one scan pose");
  PointCloud map_cloud;
  map_cloud.frame = Frame::map;
  for (const StateVector12& pose : poses) {
    if (!pose.is_rigid())
      throw DataError("map poses must have zero change states");
    const PointCloud scan = simulate_scan(scene, pose, pattern);
    PointCloud placed = unwarp(scan, pose);
    for (Point& p : placed.points) {
      p.s = 0.0;
      map_cloud.points.push_back(p);
    }
  }
  return map_cloud;
}

}  // namespace vicet
