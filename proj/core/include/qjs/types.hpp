// SPDX-License-Identifier: Apache-2.0
// Common matrix/scalar aliases and error types used across the library.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qjs {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// eigenvalue floor applied before fractional powers / logs of states
inline constexpr double kPositivityFloor = 1e-14;

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A model/input fails validation (non-Hermitian Hamiltonian, shape
// mismatch, bad parameter ranges, unparsable matrix files, ...).
struct ConfigError : Error {
  using Error::Error;
};

// The stationary state of the generator is not unique.
struct DegenerateSteadyStateError : Error {
  using Error::Error;
};

// The stationary state has (numerically) vanishing eigenvalues.
struct NonFaithfulError : Error {
  using Error::Error;
};

// pi L pi^{-1} is not proportional to L for some jump operator.
struct NotPrivilegedError : Error {
  using Error::Error;
};

// The generator fails the quantum detailed-balance residual test.
struct NoDetailedBalanceError : Error {
  using Error::Error;
};

// A restricted linear solve (Drazin / Green) is numerically singular.
struct SingularRestrictionError : Error {
  using Error::Error;
};

// Trajectory state norm left the allowed window before renormalization.
struct NormCollapseError : Error {
  using Error::Error;
};

// Truncated Fock space too small for the requested thermal path.
struct TruncationInadequateError : Error {
  using Error::Error;
};

// An iteration failed to converge within its budget.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace qjs
