// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace cdt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract data: dimension mismatch, asymmetry, a
/// matrix that should be positive definite but is not, non-finite entries.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The instance has no interior point: min over the unit ball of the
/// ellipsoid function is not below a0.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// The instance file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (pole hit, no convergence, no feasible point).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// True when `m` is square and symmetric to `rel_tol` relative to its norm.
bool is_symmetric(const Matrix& m, double rel_tol = 1e-10);

}  // namespace cdt
