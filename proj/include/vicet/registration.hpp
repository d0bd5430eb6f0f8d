#pragma once

// Scan-to-map registration.
//
// The full estimator solves for all 12 states (start pose + per-sweep
// change) against an undistorted map: each matched voxel contributes a
// 3-row weighted residual between its map mean and its scan mean pushed
// through the sensor pose at the voxel timestamp. Because residual rows at
// timestamp s carry Jacobian blocks [I | sI | -P | -sP], a single sweep
// observes both where the sensor started and how it moved — no odometry or
// IMU prior enters.
//
// The rigid baseline (ndt_register) is the identical pipeline with the six
// change states pinned to zero, which isolates what joint distortion
// estimation buys.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "vicet/cloud.hpp"
#include "vicet/errors.hpp"
#include "vicet/geometry.hpp"
#include "vicet/voxel_grid.hpp"

namespace vicet {

struct RegistrationConfig {
  SphericalGridSpec grid;
  int max_iterations = 60;
  double translation_tolerance = 1e-4;  // metres, per-block step norm
  double rotation_tolerance = 1e-5;     // radians
  double lm_lambda0 = 1e-3;
  double lm_up = 10.0;    // multiplier after a rejected step
  double lm_down = 3.0;   // divisor after an accepted step
  int lm_max_rejects = 16;
  double condition_limit = 1e10;
  double icp_max_correspondence = 2.0;  // metres (ICP baseline only)

  void validate() const {
    grid.validate();
    if (max_iterations < 1) throw DataError("max_iterations must be >= 1");
    if (translation_tolerance <= 0.0 || rotation_tolerance <= 0.0)
      throw DataError("step tolerances must be positive");
    if (lm_lambda0 < 0.0 || lm_up <= 1.0 || lm_down <= 1.0)
      throw DataError("damping schedule must increase on reject and decrease on accept");
    if (condition_limit <= 1.0) throw DataError("condition limit must exceed 1");
    if (icp_max_correspondence <= 0.0)
      throw DataError("correspondence gate must be positive");
  }
};

struct IterationRecord {
  int iteration = 0;
  double cost_before = 0.0;  // of the frozen system at the incoming state
  double cost_after = 0.0;   // of the same frozen system at the accepted state
  double lambda = 0.0;
  int rejects = 0;
  double step_translation = 0.0;
  double step_rotation = 0.0;
  int voxel_count = 0;
};

struct RegistrationResult {
  StateVector12 state;
  Mat12 covariance = Mat12::Zero();
  int iterations = 0;
  bool converged = false;
  double cost = 0.0;
  std::vector<IterationRecord> trace;
};

// Per-voxel weight: information of the residual mean under the voxel's
// Gaussian moments, with suppressed directions projected out on both sides
// so they drive neither the residual nor the Jacobian.
inline Mat3 weight_block(const VoxelStats& v, const Mat3& r_mid) {
  const Mat3 m = v.sigma_map / v.n_map +
                 r_mid * v.sigma_scan_body * r_mid.transpose() / v.n_scan;
  const Mat3 p = v.projector();
  return p * m.inverse() * p;
}

// Linearisation of one voxel set at one state. Keeps the voxel moments so a
// candidate state can be re-costed against the frozen association/weights.
struct LinearSystem {
  std::vector<VoxelStats> voxels;
  std::vector<Mat3x12> h;
  std::vector<Vec3> y;
  std::vector<Mat3> w;

  int voxel_count() const { return static_cast<int>(voxels.size()); }

  Mat12 normal_matrix() const {
    Mat12 n = Mat12::Zero();
    for (size_t i = 0; i < h.size(); ++i)
      n += h[i].transpose() * w[i] * h[i];
    return n;
  }

  Vec12 normal_rhs() const {
    Vec12 g = Vec12::Zero();
    for (size_t i = 0; i < h.size(); ++i)
      g += h[i].transpose() * w[i] * y[i];
    return g;
  }

  double cost() const {
    double c = 0.0;
    for (size_t i = 0; i < y.size(); ++i) c += y[i].dot(w[i] * y[i]);
    return c;
  }
};

// Residual and Jacobian of one voxel at state x. The predicted scan mean is
// the body-frame mean pushed through the pose at the voxel timestamp; the
// Jacobian's lever arm is that same rotated mean.
inline void assemble_row(const VoxelStats& v, const StateVector12& x,
                         Mat3x12& h_out, Vec3& y_out, Mat3& w_out) {
  const Pose pose = pose_at_time(x, v.s_mid);
  const Vec3 predicted = pose.apply(v.mu_scan_body);
  y_out = v.mu_map - predicted;
  h_out = jacobian_block(predicted, v.s_mid, x);
  w_out = weight_block(v, pose.rotation);
}

// Associate, suppress, and linearise the scan against cached map moments at
// the given state. map_stats must be anchored at x's start pose.
inline LinearSystem build_system(const MapStats& map_stats,
                                 const PointCloud& scan_body,
                                 const StateVector12& x,
                                 const SphericalGridSpec& spec) {
  const PointCloud scan_mapped = unwarp(scan_body, x);
  std::vector<VoxelStats> voxels =
      associate(map_stats, scan_mapped, scan_body, spec);
  suppress_extended_surfaces(voxels, spec, map_stats.origin);
  if (static_cast<int>(voxels.size()) < kMinVoxels)
    throw DataError("under-constrained: only " +
                    std::to_string(voxels.size()) +
                    " voxels survive extended-surface suppression");

  LinearSystem sys;
  sys.voxels = std::move(voxels);
  sys.h.resize(sys.voxels.size());
  sys.y.resize(sys.voxels.size());
  sys.w.resize(sys.voxels.size());
  for (size_t i = 0; i < sys.voxels.size(); ++i)
    assemble_row(sys.voxels[i], x, sys.h[i], sys.y[i], sys.w[i]);
  return sys;
}

// Cost of a state against a frozen system: residuals are recomputed from
// the stored voxel moments, weights stay as linearised.
inline double cost_at(const LinearSystem& sys, const StateVector12& x) {
  double c = 0.0;
  for (size_t i = 0; i < sys.voxels.size(); ++i) {
    const VoxelStats& v = sys.voxels[i];
    const Vec3 y = v.mu_map - pose_at_time(x, v.s_mid).apply(v.mu_scan_body);
    c += y.dot(sys.w[i] * y);
  }
  return c;
}

namespace detail {

inline constexpr int kRigidIndex[6] = {0, 1, 2, 6, 7, 8};

// Symmetric PSD (pseudo-)inverse for the reported covariance.
template <typename Mat>
Mat psd_inverse(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  const double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
  typename Eigen::SelfAdjointEigenSolver<Mat>::RealVectorType inv =
      eig.eigenvalues();
  for (int i = 0; i < inv.size(); ++i)
    inv[i] = inv[i] > lmax * 1e-12 ? 1.0 / inv[i] : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

// One damped weighted-least-squares step on the assembled system:
// delta = (H^T W H + lambda diag(H^T W H))^-1 H^T W y, with the six change
// states frozen to zero when rigid_only. Throws ConditioningError (null
// direction embedded in 12 coordinates) when the damped normal matrix is
// effectively singular.
inline Vec12 solve_wls(const LinearSystem& sys, double lambda,
                       double condition_limit = 1e10,
                       bool rigid_only = false) {
  const Mat12 n12 = sys.normal_matrix();
  const Vec12 g12 = sys.normal_rhs();

  const auto solve_block = [&](const Eigen::MatrixXd& n,
                               const Eigen::VectorXd& g) -> Eigen::VectorXd {
    Eigen::MatrixXd damped = n;
    damped.diagonal() += lambda * n.diagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(damped);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    const double cond = lmin > 0.0 ? lmax / lmin
                                   : std::numeric_limits<double>::infinity();
    if (!(cond < condition_limit)) {
      Eigen::VectorXd null_dir = Eigen::VectorXd::Zero(12);
      int col = 0;
      eig.eigenvalues().minCoeff(&col);
      const Eigen::VectorXd v = eig.eigenvectors().col(col);
      if (v.size() == 12) {
        null_dir = v;
      } else {
        for (int i = 0; i < 6; ++i) null_dir[detail::kRigidIndex[i]] = v[i];
      }
      throw ConditioningError(cond, null_dir);
    }
    return eig.eigenvectors() *
           (eig.eigenvectors().transpose() * g).cwiseQuotient(
               eig.eigenvalues());
  };

  if (!rigid_only) return solve_block(n12, g12);

  Eigen::MatrixXd n6(6, 6);
  Eigen::VectorXd g6(6);
  for (int i = 0; i < 6; ++i) {
    g6[i] = g12[detail::kRigidIndex[i]];
    for (int j = 0; j < 6; ++j)
      n6(i, j) = n12(detail::kRigidIndex[i], detail::kRigidIndex[j]);
  }
  const Eigen::VectorXd d6 = solve_block(n6, g6);
  Vec12 delta = Vec12::Zero();
  for (int i = 0; i < 6; ++i) delta[detail::kRigidIndex[i]] = d6[i];
  return delta;
}

namespace detail {

inline RegistrationResult register_impl(const PointCloud& map_cloud,
                                        const PointCloud& scan,
                                        const StateVector12& init,
                                        const RegistrationConfig& cfg,
                                        bool rigid_only) {
  cfg.validate();
  if (scan.frame != Frame::body)
    throw DataError("registration expects a body-frame scan");

  StateVector12 x = init;
  if (rigid_only) {
    x.dx = Vec3::Zero();
    x.dtheta = EulerAngles{};
  }

  MapStats map_stats = voxelize(map_cloud, cfg.grid, pose_at_time(x, 0.0));
  LinearSystem sys = build_system(map_stats, scan, x, cfg.grid);
  double cost = sys.cost();
  double lambda = cfg.lm_lambda0;

  RegistrationResult result;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    Vec12 delta = solve_wls(sys, lambda, cfg.condition_limit, rigid_only);
    StateVector12 candidate = advance(x, delta);
    double candidate_cost = cost_at(sys, candidate);
    int rejects = 0;
    while (candidate_cost > cost && rejects < cfg.lm_max_rejects) {
      lambda *= cfg.lm_up;
      delta = solve_wls(sys, lambda, cfg.condition_limit, rigid_only);
      candidate = advance(x, delta);
      candidate_cost = cost_at(sys, candidate);
      ++rejects;
    }
    if (candidate_cost > cost) break;  // no acceptable step: give up

    IterationRecord rec;
    rec.iteration = iter;
    rec.cost_before = cost;
    rec.cost_after = candidate_cost;
    rec.lambda = lambda;
    rec.rejects = rejects;
    rec.step_translation =
        std::max(delta.segment<3>(0).norm(), delta.segment<3>(3).norm());
    rec.step_rotation =
        std::max(delta.segment<3>(6).norm(), delta.segment<3>(9).norm());
    rec.voxel_count = sys.voxel_count();
    result.trace.push_back(rec);

    x = candidate;
    lambda = std::max(lambda / cfg.lm_down, 1e-15);
    result.iterations = iter;

    // Fresh association (and grid anchor) at the accepted state.
    map_stats = voxelize(map_cloud, cfg.grid, pose_at_time(x, 0.0));
    sys = build_system(map_stats, scan, x, cfg.grid);
    cost = sys.cost();

    if (rec.step_translation < cfg.translation_tolerance &&
        rec.step_rotation < cfg.rotation_tolerance) {
      result.converged = true;
      break;
    }
  }

  result.state = x;
  result.cost = cost;
  const Mat12 n12 = sys.normal_matrix();
  if (rigid_only) {
    Eigen::MatrixXd n6(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        n6(i, j) = n12(kRigidIndex[i], kRigidIndex[j]);
    const Eigen::MatrixXd c6 = psd_inverse(n6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        result.covariance(kRigidIndex[i], kRigidIndex[j]) = c6(i, j);
  } else {
    result.covariance = psd_inverse<Eigen::MatrixXd>(n12);
  }
  return result;
}

}  // namespace detail

// Joint rigid + distortion estimate (all 12 states).
inline RegistrationResult vicet_register(const PointCloud& map_cloud,
                                         const PointCloud& scan,
                                         const StateVector12& init,
                                         const RegistrationConfig& cfg = {}) {
  return detail::register_impl(map_cloud, scan, init, cfg, false);
}

// Rigid-only baseline: the same voxel pipeline with change states pinned
// to zero.
inline RegistrationResult ndt_register(const PointCloud& map_cloud,
                                       const PointCloud& scan,
                                       const StateVector12& init,
                                       const RegistrationConfig& cfg = {}) {
  return detail::register_impl(map_cloud, scan, init, cfg, true);
}

}  // namespace vicet
