#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wnac {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Time-indexed storage: one row per step, one column per component.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Invalid configuration, inputs that violate a documented precondition,
// or inconsistent dimensions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File-system failures; the message always carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wnac
