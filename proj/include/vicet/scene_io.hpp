#pragma once

// Scene description files (flat key = value, '#' comments):
//
//   room_half_extents = 5 5 2.5        # metres
//   obstacle = 2 1 0  0.5 0.5 1        # center then half extents; repeatable
//   azimuth_steps = 360
//   elevation_rings = 16               # evenly spaced rings, or:
//   elevation_deg = -30 -25 -20 ...    # explicit list (overrides rings)
//   elevation_min_deg = -30
//   elevation_max_deg = 15
//   true_state = 0 0 0  0.5 0 0  0 0 0  0 0 0   # x0 dx theta0 dtheta (m, rad)
//   map_pose = 0 0 0  0 0 0            # x0 theta0 for map building; repeatable
//   period = 0.1                       # seconds per sweep
//   noise_sigma = 0                    # metres
//   noise_model = isotropic            # or: range (along-beam only)
//   seed = 0

#include <string>
#include <vector>

#include "vicet/geometry.hpp"
#include "vicet/key_value.hpp"
#include "vicet/simulator.hpp"

namespace vicet {

struct SceneFile {
  RoomScene scene;
  BeamPattern pattern;
  StateVector12 true_state;
  std::vector<StateVector12> map_poses;  // empty: use true_state's rigid part
  SimulationOptions options;
  double period = 0.1;
};

inline SceneFile load_scene_file(const std::string& path) {
  const KeyValueFile kv = KeyValueFile::parse_file(path);
  SceneFile f;

  const std::vector<double> half = kv.require_numbers("room_half_extents", 3);
  f.scene.half_extents = Vec3(half[0], half[1], half[2]);

  for (const KeyValueFile::Entry* e : kv.all("obstacle")) {
    const std::vector<double> v = kv.parse_numbers(*e);
    if (v.size() != 6)
      throw IoError(kv.where(*e) +
                    ": obstacle needs 6 numbers (center, half extents)");
    f.scene.obstacles.push_back(
        {Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
  }

  f.pattern = BeamPattern::default_pattern();
  f.pattern.azimuth_steps = kv.get_int("azimuth_steps", 360);
  if (kv.has("elevation_deg")) {
    f.pattern.elevation_angles.clear();
    for (double deg : kv.get_numbers("elevation_deg"))
      f.pattern.elevation_angles.push_back(deg_to_rad(deg));
  } else if (kv.has("elevation_rings") || kv.has("elevation_min_deg") ||
             kv.has("elevation_max_deg")) {
    const int rings = kv.get_int("elevation_rings", 16);
    if (rings < 1) throw IoError(path + ": elevation_rings must be >= 1");
    const double lo = deg_to_rad(kv.get_double("elevation_min_deg", -30.0));
    const double hi = deg_to_rad(kv.get_double("elevation_max_deg", 15.0));
    f.pattern.elevation_angles.clear();
    for (int i = 0; i < rings; ++i)
      f.pattern.elevation_angles.push_back(
          rings == 1 ? (lo + hi) / 2.0 : lo + (hi - lo) * i / (rings - 1.0));
  }

  if (kv.has("true_state")) {
    const std::vector<double> v = kv.require_numbers("true_state", 12);
    f.true_state = StateVector12::from_vec(Eigen::Map<const Vec12>(v.data()));
  }

  for (const KeyValueFile::Entry* e : kv.all("map_pose")) {
    const std::vector<double> v = kv.parse_numbers(*e);
    if (v.size() != 6)
      throw IoError(kv.where(*e) + ": map_pose needs 6 numbers (x0, theta0)");
    f.map_poses.push_back(StateVector12::rigid(
        Vec3(v[0], v[1], v[2]), EulerAngles{v[3], v[4], v[5]}));
  }

  f.period = kv.get_double("period", 0.1);
  f.options.noise_sigma = kv.get_double("noise_sigma", 0.0);
  const std::string model = kv.get_string("noise_model", "isotropic");
  if (model == "range")
    f.options.noise_model = NoiseModel::range;
  else if (model != "isotropic")
    throw IoError(path + ": noise_model must be isotropic or range");
  const int seed = kv.get_int("seed", 0);
  if (seed < 0) throw IoError(path + ": seed must be non-negative");
  f.options.seed = static_cast<uint32_t>(seed);
  return f;
}

}  // namespace vicet
