#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace proxbundle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Base for all library errors. The subclasses mirror the error categories the
// callers dispatch on (the CLI maps them to exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A data structure invariant was violated (empty model, size mismatch, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Inconsistent parameters or configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The constraint set {y : Ay <= b} admits no point, or the start point is outside it.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// The problem cannot provide something the caller requires.
class UnsupportedProblemError : public Error {
 public:
  using Error::Error;
};

// The optimizer could not continue (proximity parameter overflow, QP cycling).
class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace proxbundle
