#pragma once

#include <stdexcept>
#include <string>

namespace finslerkit {

/// Base class of every error raised by the toolkit.
class FinslerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The metric matrix (or fundamental tensor) is singular or not positive
/// definite at the evaluation point.
class DegenerateMetricError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

/// s = β/α lies outside the admissible domain of the φ-family.
class SingularSError : public FinslerError {
 public:
  SingularSError(const std::string& what, double s) : FinslerError(what), s_(s) {}
  double s() const { return s_; }

 private:
  double s_;
};

/// φ − sφ' vanishes, so Q is undefined.
class DegenerateDirectionError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class SingularDeltaError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

/// A family-specific formula was requested outside the hypotheses it was
/// derived under.
class PreconditionError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

class UnsupportedError : public FinslerError {
 public:
  using FinslerError::FinslerError;
};

/// Invalid scenario configuration. `field()` is the offending field path.
class ConfigError : public FinslerError {
 public:
  ConfigError(std::string field, const std::string& message)
      : FinslerError(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace finslerkit
