#pragma once

// Point clouds with per-point scaled timestamps. A body-frame cloud is one
// raw LIDAR sweep: point i was measured at scaled time s_i in [0, 1] in the
// sensor frame of that instant. Map-frame clouds are expressed in the fixed
// map frame; map products carry s = 0 (maps are timeless) while unwarped
// scans keep their capture times so the operation stays invertible.

#include <cstddef>
#include <optional>
#include <vector>

#include "vicet/geometry.hpp"

namespace vicet {

enum class Frame { body, map };

struct Point {
  Vec3 position = Vec3::Zero();
  double s = 0.0;  // scaled time in [0, 1]
};

struct PointCloud {
  std::vector<Point> points;
  Frame frame = Frame::body;
  double period = 0.1;  // sweep duration in seconds (informational)

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Scaled time of a beam fired at the given azimuth (radians, measured in
// the start-of-scan body frame). The sweep covers [0, 2*pi); anything
// outside that window has no valid timestamp.
inline std::optional<double> scaled_time_from_azimuth(double azimuth) {
  if (!(azimuth >= 0.0 && azimuth < 2.0 * kPi)) return std::nullopt;
  return azimuth / (2.0 * kPi);
}

// Undo motion distortion: each point is pushed through the sensor pose at
// its own capture time. Order and timestamps are preserved, so applying the
// per-point inverse pose recovers the input exactly.
inline PointCloud unwarp(const PointCloud& cloud, const StateVector12& x) {
  PointCloud out;
  out.points.reserve(cloud.size());
  out.frame = Frame::map;
  out.period = cloud.period;
  for (const Point& p : cloud.points)
    out.points.push_back({apply_state(p.position, p.s, x), p.s});
  return out;
}

}  // namespace vicet
