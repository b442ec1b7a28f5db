#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace icc {

using cplx = std::complex<double>;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Smallest variance any message-passing stage is allowed to carry.
inline constexpr double kVarianceFloor = 1e-12;

// Error hierarchy. Configuration and I/O errors abort a campaign; numerical
// divergence is counted per trial.

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class DegenerateInputError : public Error {
public:
  using Error::Error;
};

class SingularSystemError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class NumericalDivergence : public Error {
public:
  NumericalDivergence(const std::string& stage, int iteration)
      : Error(stage + ": non-finite value at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

private:
  int iteration_;
};

}  // namespace icc
