#pragma once

// Evaluation metrics: normalized chamfer distance against a map (with
// inflated-convex-hull outlier rejection) and batch error statistics of
// registration results against ground truth.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "vicet/cloud.hpp"
#include "vicet/convex_hull.hpp"
#include "vicet/errors.hpp"
#include "vicet/geometry.hpp"
#include "vicet/kd_tree.hpp"
#include "vicet/registration.hpp"

namespace vicet {

struct ChamferReport {
  double normalized = 0.0;  // mean squared nearest-neighbour distance, m^2
  int used = 0;
  int rejected = 0;
  double inflation = 0.0;
};

// Mean squared distance from each surviving scan point to its exact nearest
// map point. Scan points outside the map's convex hull inflated by the
// given factor (about the hull-vertex mean) never had a map counterpart —
// typically artifacts of mis-registration — and are rejected rather than
// allowed to dominate the sum.
inline ChamferReport chamfer(const PointCloud& scan_map_frame,
                             const PointCloud& map_cloud,
                             double inflation = 0.05) {
  if (scan_map_frame.frame != Frame::map)
    throw DataError("chamfer expects the scan already in the map frame");
  if (scan_map_frame.empty()) throw DataError("chamfer: empty scan");
  if (!(inflation >= 0.0)) throw DataError("chamfer: inflation must be >= 0");

  std::vector<Vec3> map_points;
  map_points.reserve(map_cloud.size());
  for (const Point& p : map_cloud.points) map_points.push_back(p.position);
  const ConvexHull3 hull = ConvexHull3::build(map_points);
  const KdTree tree(std::move(map_points));

  ChamferReport report;
  report.inflation = inflation;
  double sum = 0.0;
  for (const Point& p : scan_map_frame.points) {
    if (!hull.contains(p.position, inflation)) {
      ++report.rejected;
      continue;
    }
    sum += tree.nearest(p.position).dist2;
    ++report.used;
  }
  if (report.used == 0)
    throw DataError("chamfer: every scan point fell outside the inflated hull");
  report.normalized = sum / report.used;
  return report;
}

struct ComponentStats {
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation; 0 for a single sample
};

// Signed error statistics over a batch of registrations. Translations in
// metres (components in the map frame plus the projection onto a caller-
// supplied forward axis); angles in degrees, extracted from the relative
// rotation R_true^-1 * R_est so yaw error is about the map vertical.
struct ErrorStats {
  ComponentStats x, y, z, forward;
  ComponentStats roll, pitch, yaw;
  ComponentStats dx, dy, dz, dforward;
  ComponentStats droll, dpitch, dyaw;
  int samples = 0;

  std::vector<std::pair<std::string, const ComponentStats*>> rows() const {
    return {{"x_m", &x},         {"y_m", &y},
            {"z_m", &z},         {"forward_m", &forward},
            {"roll_deg", &roll}, {"pitch_deg", &pitch},
            {"yaw_deg", &yaw},   {"dx_m", &dx},
            {"dy_m", &dy},       {"dz_m", &dz},
            {"dforward_m", &dforward}, {"droll_deg", &droll},
            {"dpitch_deg", &dpitch},   {"dyaw_deg", &dyaw}};
  }
};

namespace detail {

inline ComponentStats stats_of(const std::vector<double>& v) {
  ComponentStats s;
  const int n = static_cast<int>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= n;
  if (n > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(acc / (n - 1));
  }
  return s;
}

}  // namespace detail

inline ErrorStats error_stats(const std::vector<StateVector12>& estimates,
                              const std::vector<StateVector12>& truths,
                              const Vec3& forward_axis) {
  if (estimates.empty()) throw DataError("error statistics need at least one sample");
  if (estimates.size() != truths.size())
    throw DataError("estimate and truth counts differ (" +
                    std::to_string(estimates.size()) + " vs " +
                    std::to_string(truths.size()) + ")");
  if (!(forward_axis.norm() > 0.0))
    throw DataError("forward axis must be non-zero");
  const Vec3 fwd = forward_axis.normalized();

  const int n = static_cast<int>(estimates.size());
  std::vector<std::vector<double>> cols(14, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    const StateVector12& est = estimates[i];
    const StateVector12& truth = truths[i];

    const Vec3 e_pos = est.x0 - truth.x0;
    const EulerAngles e_rot = rotation_to_euler(
        euler_to_rotation(truth.theta0).transpose() *
        euler_to_rotation(est.theta0));
    const Vec3 e_dpos = est.dx - truth.dx;
    const EulerAngles e_drot = rotation_to_euler(
        euler_to_rotation(truth.dtheta).transpose() *
        euler_to_rotation(est.dtheta));

    cols[0][i] = e_pos.x();
    cols[1][i] = e_pos.y();
    cols[2][i] = e_pos.z();
    cols[3][i] = e_pos.dot(fwd);
    cols[4][i] = rad_to_deg(e_rot.roll);
    cols[5][i] = rad_to_deg(e_rot.pitch);
    cols[6][i] = rad_to_deg(e_rot.yaw);
    cols[7][i] = e_dpos.x();
    cols[8][i] = e_dpos.y();
    cols[9][i] = e_dpos.z();
    cols[10][i] = e_dpos.dot(fwd);
    cols[11][i] = rad_to_deg(e_drot.roll);
    cols[12][i] = rad_to_deg(e_drot.pitch);
    cols[13][i] = rad_to_deg(e_drot.yaw);
  }

  ErrorStats out;
  out.samples = n;
  out.x = detail::stats_of(cols[0]);
  out.y = detail::stats_of(cols[1]);
  out.z = detail::stats_of(cols[2]);
  out.forward = detail::stats_of(cols[3]);
  out.roll = detail::stats_of(cols[4]);
  out.pitch = detail::stats_of(cols[5]);
  out.yaw = detail::stats_of(cols[6]);
  out.dx = detail::stats_of(cols[7]);
  out.dy = detail::stats_of(cols[8]);
  out.dz = detail::stats_of(cols[9]);
  out.dforward = detail::stats_of(cols[10]);
  out.droll = detail::stats_of(cols[11]);
  out.dpitch = detail::stats_of(cols[12]);
  out.dyaw = detail::stats_of(cols[13]);
  return out;
}

}  // namespace vicet
