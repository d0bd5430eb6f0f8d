#pragma once

// Spherical voxelisation and scan/map association.
//
// The grid lives in the frame of the *estimated* sensor pose at scan start:
// grid coordinates are q = R0^T (p - x0). That anchors the 0-degree azimuth
// boundary to the scan-start beam direction, so a grid cell's azimuth
// interval doubles as a capture-time interval (s = azimuth / 2*pi) and the
// midpoint timestamp s_mid assigned to each voxel is meaningful.
//
// Cells are azimuth x elevation x radial-shell boxes. Per-voxel Gaussian
// moments feed the registration weights; directions in which a map voxel's
// spread rivals the cell itself (extended surfaces: walls, floors) carry no
// information about where along the surface the sensor sits and are
// suppressed by projecting them out.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vicet/cloud.hpp"
#include "vicet/errors.hpp"
#include "vicet/geometry.hpp"

namespace vicet {

// Added to every voxel covariance so perfectly flat or axis-aligned samples
// keep an invertible noise model.
inline constexpr double kCovarianceFloor = 1e-8;

// Registration refuses to run on fewer constraints than this many voxels.
inline constexpr int kMinVoxels = 5;

struct SphericalGridSpec {
  int azimuth_bins = 36;
  int elevation_bins = 10;
  double elevation_min = deg_to_rad(-30.0);
  double elevation_max = deg_to_rad(15.0);
  std::vector<double> radial_edges = {1, 2, 4, 8, 16, 32, 64};
  int min_points = 10;
  double suppression_tau = 0.5;   // suppress when sigma > tau * cell extent
  double time_gate_bins = 1.0;    // drop scan points whose own timestamp
                                  // disagrees with their cell azimuth by
                                  // more than this many bins; <= 0 disables

  void validate() const {
    if (azimuth_bins < 1 || elevation_bins < 1)
      throw DataError("grid needs at least one azimuth and elevation bin");
    if (!(elevation_max > elevation_min))
      throw DataError("grid elevation range is empty");
    if (radial_edges.size() < 2 ||
        !std::is_sorted(radial_edges.begin(), radial_edges.end()) ||
        radial_edges.front() <= 0.0)
      throw DataError("grid radial edges must be positive and increasing");
    if (min_points < 2)
      throw DataError("grid min_points must be at least 2");
    if (suppression_tau <= 0.0)
      throw DataError("grid suppression threshold must be positive");
  }

  double azimuth_width() const { return 2.0 * kPi / azimuth_bins; }
  double elevation_width() const {
    return (elevation_max - elevation_min) / elevation_bins;
  }
};

struct VoxelKey {
  int azimuth = 0;
  int elevation = 0;
  int radial = 0;
  auto operator<=>(const VoxelKey&) const = default;
};

// Bin of a point already expressed in grid coordinates; nullopt when the
// point falls outside the grid. Top edges are inclusive so the outermost
// ring/shell keeps its boundary points.
inline std::optional<VoxelKey> classify(const Vec3& q,
                                        const SphericalGridSpec& spec) {
  const double r = q.norm();
  if (r < spec.radial_edges.front() || r > spec.radial_edges.back())
    return std::nullopt;
  int radial = static_cast<int>(std::upper_bound(spec.radial_edges.begin(),
                                                 spec.radial_edges.end(), r) -
                                spec.radial_edges.begin()) - 1;
  radial = std::min(radial, static_cast<int>(spec.radial_edges.size()) - 2);

  const double elevation = std::asin(std::clamp(q.z() / r, -1.0, 1.0));
  if (elevation < spec.elevation_min || elevation > spec.elevation_max)
    return std::nullopt;
  const int el = std::min(
      static_cast<int>((elevation - spec.elevation_min) / spec.elevation_width()),
      spec.elevation_bins - 1);

  double azimuth = std::atan2(q.y(), q.x());
  if (azimuth < 0.0) azimuth += 2.0 * kPi;
  const int az = std::min(static_cast<int>(azimuth / spec.azimuth_width()),
                          spec.azimuth_bins - 1);
  return VoxelKey{az, el, radial};
}

// Capture time attributed to a whole azimuth column: its midpoint azimuth
// as a fraction of the sweep.
inline double bin_s_mid(int azimuth_bin, const SphericalGridSpec& spec) {
  return (azimuth_bin + 0.5) * spec.azimuth_width() / (2.0 * kPi);
}

struct VoxelMoments {
  Vec3 mean = Vec3::Zero();
  Mat3 covariance = Mat3::Zero();
  int count = 0;
};

struct MapStats {
  Pose origin;  // grid anchor: estimated sensor pose at s = 0
  std::map<VoxelKey, VoxelMoments> voxels;
};

namespace detail {

inline VoxelMoments moments_of(const std::vector<Vec3>& pts) {
  VoxelMoments m;
  m.count = static_cast<int>(pts.size());
  for (const Vec3& p : pts) m.mean += p;
  m.mean /= m.count;
  for (const Vec3& p : pts) {
    const Vec3 d = p - m.mean;
    m.covariance += d * d.transpose();
  }
  m.covariance /= (m.count - 1);
  m.covariance += kCovarianceFloor * Mat3::Identity();
  return m;
}

}  // namespace detail

// Per-voxel Gaussian moments of a map cloud over the grid anchored at
// origin. Voxels with fewer than min_points points are dropped.
inline MapStats voxelize(const PointCloud& map_cloud,
                         const SphericalGridSpec& spec, const Pose& origin) {
  spec.validate();
  if (map_cloud.frame != Frame::map)
    throw DataError("voxelize expects a map-frame cloud");

  const Pose to_grid = origin.inverse();
  std::map<VoxelKey, std::vector<Vec3>> cells;
  for (const Point& p : map_cloud.points) {
    const std::optional<VoxelKey> key = classify(to_grid.apply(p.position), spec);
    if (key) cells[*key].push_back(p.position);
  }

  MapStats stats;
  stats.origin = origin;
  for (const auto& [key, pts] : cells)
    if (static_cast<int>(pts.size()) >= spec.min_points)
      stats.voxels.emplace(key, detail::moments_of(pts));
  if (stats.voxels.empty())
    throw DataError("no map voxel reached min_points; grid and cloud do not overlap");
  return stats;
}

// One matched voxel: map moments (map frame), scan moments (body frame),
// the cell timestamp, and after suppression the retained directions.
struct VoxelStats {
  VoxelKey key;
  Vec3 mu_map = Vec3::Zero();
  Mat3 sigma_map = Mat3::Zero();
  int n_map = 0;
  Vec3 mu_scan_body = Vec3::Zero();
  Mat3 sigma_scan_body = Mat3::Zero();
  int n_scan = 0;
  double s_mid = 0.0;
  // Orthonormal columns spanning the directions kept by extended-surface
  // suppression (3 columns until suppression runs).
  Eigen::Matrix<double, 3, Eigen::Dynamic> retained =
      Eigen::Matrix<double, 3, Eigen::Dynamic>::Identity(3, 3);

  Mat3 projector() const { return retained * retained.transpose(); }
};

// Match scan points to map voxels. scan_mapped is the scan pushed through
// the current state estimate (same order as scan_body, whose coordinates
// feed the body-frame moments). Scan points are binned on the same grid as
// the map; a cell contributes only when both sides have enough points.
// Points whose own timestamp disagrees with the cell azimuth by more than
// time_gate_bins bins are aberrations (wrap-around under distortion) and
// are dropped.
inline std::vector<VoxelStats> associate(const MapStats& map_stats,
                                         const PointCloud& scan_mapped,
                                         const PointCloud& scan_body,
                                         const SphericalGridSpec& spec) {
  spec.validate();
  if (scan_mapped.size() != scan_body.size())
    throw DataError("associate: mapped and body clouds differ in size");

  const Pose to_grid = map_stats.origin.inverse();
  std::map<VoxelKey, std::vector<int>> cells;
  for (int i = 0; i < static_cast<int>(scan_mapped.size()); ++i) {
    const std::optional<VoxelKey> key =
        classify(to_grid.apply(scan_mapped.points[i].position), spec);
    if (!key) continue;
    if (spec.time_gate_bins > 0.0) {
      const double cell_az = (key->azimuth + 0.5) * spec.azimuth_width();
      const double own_az = 2.0 * kPi * scan_body.points[i].s;
      double gap = std::abs(own_az - cell_az);
      gap = std::min(gap, 2.0 * kPi - gap);
      if (gap > spec.time_gate_bins * spec.azimuth_width()) continue;
    }
    cells[*key].push_back(i);
  }

  std::vector<VoxelStats> out;
  for (const auto& [key, indices] : cells) {
    if (static_cast<int>(indices.size()) < spec.min_points) continue;
    const auto it = map_stats.voxels.find(key);
    if (it == map_stats.voxels.end()) continue;

    std::vector<Vec3> body;
    body.reserve(indices.size());
    for (int i : indices) body.push_back(scan_body.points[i].position);
    const VoxelMoments scan_m = detail::moments_of(body);

    VoxelStats v;
    v.key = key;
    v.mu_map = it->second.mean;
    v.sigma_map = it->second.covariance;
    v.n_map = it->second.count;
    v.mu_scan_body = scan_m.mean;
    v.sigma_scan_body = scan_m.covariance;
    v.n_scan = scan_m.count;
    v.s_mid = bin_s_mid(key.azimuth, spec);
    out.push_back(std::move(v));
  }
  if (static_cast<int>(out.size()) < kMinVoxels)
    throw DataError("under-constrained: only " + std::to_string(out.size()) +
                    " voxels matched (need " + std::to_string(kMinVoxels) + ")");
  return out;
}

// Drop eigendirections of the map covariance whose spread rivals the cell
// itself. Cell extent along a direction v blends the three half-chords of
// the spherical cell: azimuthal r*cos(el)*sin(daz/2), elevational
// r*sin(del/2), radial (r_hi - r_lo)/2. A direction is suppressed when
// sqrt(lambda) > tau * extent; voxels with nothing left are removed.
inline void suppress_extended_surfaces(std::vector<VoxelStats>& voxels,
                                       const SphericalGridSpec& spec,
                                       const Pose& origin) {
  std::vector<VoxelStats> kept;
  kept.reserve(voxels.size());
  for (VoxelStats& v : voxels) {
    const Vec3 q = origin.inverse().apply(v.mu_map);
    const double r = q.norm();
    const double elevation = std::asin(std::clamp(q.z() / r, -1.0, 1.0));
    const double azimuth = std::atan2(q.y(), q.x());

    const double h_az = r * std::cos(elevation) * std::sin(spec.azimuth_width() / 2.0);
    const double h_el = r * std::sin(spec.elevation_width() / 2.0);
    const double h_r = (spec.radial_edges[v.key.radial + 1] -
                        spec.radial_edges[v.key.radial]) / 2.0;

    const double ca = std::cos(azimuth), sa = std::sin(azimuth);
    const double ce = std::cos(elevation), se = std::sin(elevation);
    const Vec3 e_r = origin.rotation * Vec3(ce * ca, ce * sa, se);
    const Vec3 e_az = origin.rotation * Vec3(-sa, ca, 0.0);
    const Vec3 e_el = origin.rotation * Vec3(-se * ca, -se * sa, ce);

    Eigen::SelfAdjointEigenSolver<Mat3> eig(v.sigma_map);
    std::vector<Vec3> keep_dirs;
    for (int k = 0; k < 3; ++k) {
      const Vec3 dir = eig.eigenvectors().col(k);
      const double extent2 = std::pow(dir.dot(e_az) * h_az, 2) +
                             std::pow(dir.dot(e_el) * h_el, 2) +
                             std::pow(dir.dot(e_r) * h_r, 2);
      if (eig.eigenvalues()[k] <=
          spec.suppression_tau * spec.suppression_tau * extent2)
        keep_dirs.push_back(dir);
    }
    if (keep_dirs.empty()) continue;
    v.retained.resize(3, static_cast<int>(keep_dirs.size()));
    for (int k = 0; k < static_cast<int>(keep_dirs.size()); ++k)
      v.retained.col(k) = keep_dirs[k];
    kept.push_back(std::move(v));
  }
  voxels = std::move(kept);
}

}  // namespace vicet
