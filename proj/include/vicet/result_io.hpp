#pragma once

// Registration result files and solver config files (flat key = value).
//
// Result file:
//   format = vicet-result v1
//   method = vicet | ndt | icp
//   converged = 0 | 1
//   iterations = <n>
//   cost = <final weighted cost>
//   state = <12 numbers: x0 dx theta0 dtheta (m, rad)>
//   covariance = <144 numbers, row-major 12x12>
//
// Config file keys mirror RegistrationConfig / SphericalGridSpec; all are
// optional and default to the built-in values. Angles appear in degrees in
// config files for readability.

#include <fstream>
#include <string>

#include "vicet/errors.hpp"
#include "vicet/geometry.hpp"
#include "vicet/key_value.hpp"
#include "vicet/registration.hpp"

namespace vicet {

struct ResultFile {
  std::string method;
  RegistrationResult result;
};

inline void write_result(const ResultFile& rf, std::ostream& out) {
  char buf[32];
  const auto g17 = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "format = vicet-result v1\n";
  out << "method = " << rf.method << "\n";
  out << "converged = " << (rf.result.converged ? 1 : 0) << "\n";
  out << "iterations = " << rf.result.iterations << "\n";
  out << "cost = " << g17(rf.result.cost) << "\n";
  out << "state =";
  const Vec12 v = rf.result.state.vec();
  for (int i = 0; i < 12; ++i) out << ' ' << g17(v[i]);
  out << "\ncovariance =";
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) out << ' ' << g17(rf.result.covariance(i, j));
  out << "\n";
}

inline void write_result(const ResultFile& rf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  write_result(rf, out);
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

inline ResultFile read_result(const std::string& path) {
  const KeyValueFile kv = KeyValueFile::parse_file(path);
  if (kv.get_string("format", "") != "vicet-result v1")
    throw IoError(path + ": not a vicet-result v1 file");
  ResultFile rf;
  rf.method = kv.require_string("method");
  rf.result.converged = kv.get_bool("converged", false);
  rf.result.iterations = kv.get_int("iterations", 0);
  rf.result.cost = kv.get_double("cost", 0.0);
  const std::vector<double> state = kv.require_numbers("state", 12);
  rf.result.state =
      StateVector12::from_vec(Eigen::Map<const Vec12>(state.data()));
  if (kv.has("covariance")) {
    const std::vector<double> cov = kv.require_numbers("covariance", 144);
    rf.result.covariance =
        Eigen::Map<const Eigen::Matrix<double, 12, 12, Eigen::RowMajor>>(
            cov.data());
  }
  return rf;
}

inline RegistrationConfig load_registration_config(const std::string& path) {
  const KeyValueFile kv = KeyValueFile::parse_file(path);
  RegistrationConfig cfg;
  cfg.grid.azimuth_bins = kv.get_int("azimuth_bins", cfg.grid.azimuth_bins);
  cfg.grid.elevation_bins =
      kv.get_int("elevation_bins", cfg.grid.elevation_bins);
  if (kv.has("elevation_min_deg"))
    cfg.grid.elevation_min = deg_to_rad(kv.require_double("elevation_min_deg"));
  if (kv.has("elevation_max_deg"))
    cfg.grid.elevation_max = deg_to_rad(kv.require_double("elevation_max_deg"));
  if (kv.has("radial_edges")) cfg.grid.radial_edges = kv.get_numbers("radial_edges");
  cfg.grid.min_points = kv.get_int("min_points", cfg.grid.min_points);
  cfg.grid.suppression_tau =
      kv.get_double("suppression_tau", cfg.grid.suppression_tau);
  cfg.grid.time_gate_bins =
      kv.get_double("time_gate_bins", cfg.grid.time_gate_bins);
  cfg.max_iterations = kv.get_int("max_iterations", cfg.max_iterations);
  cfg.translation_tolerance =
      kv.get_double("translation_tolerance", cfg.translation_tolerance);
  cfg.rotation_tolerance =
      kv.get_double("rotation_tolerance", cfg.rotation_tolerance);
  cfg.lm_lambda0 = kv.get_double("lm_lambda0", cfg.lm_lambda0);
  cfg.lm_up = kv.get_double("lm_up", cfg.lm_up);
  cfg.lm_down = kv.get_double("lm_down", cfg.lm_down);
  cfg.lm_max_rejects = kv.get_int("lm_max_rejects", cfg.lm_max_rejects);
  cfg.condition_limit = kv.get_double("condition_limit", cfg.condition_limit);
  cfg.icp_max_correspondence =
      kv.get_double("icp_max_correspondence", cfg.icp_max_correspondence);
  cfg.validate();
  return cfg;
}

}  // namespace vicet
