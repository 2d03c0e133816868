// error.hpp: exception hierarchy shared by every eet module

#pragma once

#include <stdexcept>
#include <string>

namespace eet {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A ChainSpec (or derived parameter set) failed validation. The message
/// starts with the offending field name.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An operation was called outside its domain (e.g. Gamma = 0 for a solve
/// that needs an invertible generator).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Linear algebra failed: singular or badly conditioned generator.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Adaptive step size dropped below the representable minimum.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double time_reached)
      : Error(what), time_reached_(time_reached) {}
  double time_reached() const noexcept { return time_reached_; }

 private:
  double time_reached_;
};

/// Time integration hit its horizon before the chain emptied; carries the
/// efficiency accumulated so far, which is a lower bound on the true value.
class PartialResultError : public Error {
 public:
  PartialResultError(const std::string& what, double lower_bound)
      : Error(what), lower_bound_(lower_bound) {}
  double lower_bound() const noexcept { return lower_bound_; }

 private:
  double lower_bound_;
};

/// Two-site dip queries outside the regime where a dip exists.
class NoDipError : public Error {
 public:
  using Error::Error;
};

/// Problem too large for a dense-only code path.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unknown configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace eet
