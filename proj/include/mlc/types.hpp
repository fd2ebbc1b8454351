#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mlc {

using Scalar = double;

using VectorX = Eigen::VectorXd;
using RowVectorX = Eigen::RowVectorXd;
using MatrixX = Eigen::MatrixXd;
using Vector4 = Eigen::Vector4d;

/// Malformed or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input data, e.g. a bad dump line (CLI exit code 3).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values detected during computation (CLI exit code 4).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mlc
