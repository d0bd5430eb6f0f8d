#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace vicet {

// File could not be read/written or its contents are malformed. Messages
// carry "path:line:" where a line is known so CLI diagnostics stay greppable.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data cannot support the requested computation (empty grid, too few
// voxels, degenerate geometry, trajectory leaving the scene, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The damped normal matrix is too ill-conditioned to invert safely.
// null_direction is the unit eigenvector of the smallest eigenvalue: the
// state combination the measurements fail to pin down.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(double condition_number, Eigen::VectorXd null_direction)
      : std::runtime_error("normal matrix condition number " +
                           std::to_string(condition_number) +
                           " exceeds the configured limit"),
        condition_number(condition_number),
        null_direction(std::move(null_direction)) {}

  double condition_number;
  Eigen::VectorXd null_direction;
};

}  // namespace vicet
