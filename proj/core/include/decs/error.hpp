#pragma once

#include <stdexcept>
#include <string>

namespace decs {

/// Root of the library's exception hierarchy. Every failure surfaced by decs
/// derives from this so callers (the CLI in particular) can map errors to exit
/// codes with a single catch chain.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract arguments: non-finite data, dimension
/// mismatches, invalid configuration values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Input is well-formed but carries no usable information (e.g. an all-zero
/// data matrix has no spectrum to trim).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// The matrix exponential overflowed double precision.
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, double norm) : Error(what), norm_(norm) {}
  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

/// Population covariance of the observed variables is singular.
class SingularCovariance : public Error {
 public:
  using Error::Error;
};

/// A metric is mathematically undefined for the given inputs (e.g. TPR with
/// an empty ground truth).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

}  // namespace decs
