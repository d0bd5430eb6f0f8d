#pragma once

// Umbrella header: scan-to-map registration with joint motion-distortion
// estimation, rigid baselines, a box-room LIDAR simulator with exact ground
// truth, and evaluation metrics.

#include "vicet/cloud.hpp"
#include "vicet/cloud_io.hpp"
#include "vicet/convex_hull.hpp"
#include "vicet/errors.hpp"
#include "vicet/evaluation.hpp"
#include "vicet/geometry.hpp"
#include "vicet/icp.hpp"
#include "vicet/kd_tree.hpp"
#include "vicet/key_value.hpp"
#include "vicet/registration.hpp"
#include "vicet/result_io.hpp"
#include "vicet/scene_io.hpp"
#include "vicet/simulator.hpp"
#include "vicet/voxel_grid.hpp"
