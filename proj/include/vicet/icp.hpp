#pragma once

// Point-to-point ICP baseline. Treats the scan as rigid (timestamps are
// ignored), matches every scan point to its exact nearest map point within
// a distance gate, and re-fits the closed-form least-squares pose each
// iteration. No covariance model exists for this estimator, so the result
// covariance is all zeros.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "vicet/cloud.hpp"
#include "vicet/errors.hpp"
#include "vicet/geometry.hpp"
#include "vicet/kd_tree.hpp"
#include "vicet/registration.hpp"

namespace vicet {

inline RegistrationResult icp_register(const PointCloud& map_cloud,
                                       const PointCloud& scan,
                                       const StateVector12& init,
                                       const RegistrationConfig& cfg = {}) {
  cfg.validate();
  if (map_cloud.empty()) throw DataError("icp: empty map cloud");
  if (scan.empty()) throw DataError("icp: empty scan cloud");

  std::vector<Vec3> map_points;
  map_points.reserve(map_cloud.size());
  for (const Point& p : map_cloud.points) map_points.push_back(p.position);
  const KdTree tree(std::move(map_points));

  Mat3 r = euler_to_rotation(init.theta0);
  Vec3 t = init.x0;
  const double gate2 =
      cfg.icp_max_correspondence * cfg.icp_max_correspondence;

  RegistrationResult result;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    Vec3 scan_centroid = Vec3::Zero(), map_centroid = Vec3::Zero();
    std::vector<std::pair<Vec3, Vec3>> pairs;
    pairs.reserve(scan.size());
    for (const Point& p : scan.points) {
      const KdTree::Hit hit = tree.nearest(r * p.position + t);
      if (hit.dist2 > gate2) continue;
      const Vec3& q = tree.points()[hit.index];
      pairs.emplace_back(p.position, q);
      scan_centroid += p.position;
      map_centroid += q;
    }
    if (pairs.size() < 3) break;  // not enough constraints: give up
    scan_centroid /= static_cast<double>(pairs.size());
    map_centroid /= static_cast<double>(pairs.size());

    Mat3 cross = Mat3::Zero();
    for (const auto& [p, q] : pairs)
      cross += (p - scan_centroid) * (q - map_centroid).transpose();
    const Eigen::JacobiSVD<Mat3> svd(
        cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r_new = svd.matrixV() * svd.matrixU().transpose();
    if (r_new.determinant() < 0.0) {
      Mat3 flip = Mat3::Identity();
      flip(2, 2) = -1.0;
      r_new = svd.matrixV() * flip * svd.matrixU().transpose();
    }
    const Vec3 t_new = map_centroid - r_new * scan_centroid;

    IterationRecord rec;
    rec.iteration = iter;
    rec.cost_before = result.cost;
    rec.step_translation = (t_new - t).norm();
    rec.step_rotation = rotation_angle(r_new * r.transpose());
    rec.voxel_count = static_cast<int>(pairs.size());

    r = r_new;
    t = t_new;
    double cost = 0.0;
    for (const auto& [p, q] : pairs) cost += (r * p + t - q).squaredNorm();
    result.cost = cost / static_cast<double>(pairs.size());
    rec.cost_after = result.cost;
    result.trace.push_back(rec);
    result.iterations = iter;

    if (rec.step_translation < cfg.translation_tolerance &&
        rec.step_rotation < cfg.rotation_tolerance) {
      result.converged = true;
      break;
    }
  }

  result.state = StateVector12::rigid(t, rotation_to_euler(r));
  return result;
}

}  // namespace vicet
