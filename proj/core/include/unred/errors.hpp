#pragma once

#include <stdexcept>
#include <string>

namespace unred {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A curve or parametrization is too close to singular (collapsed samples,
/// vanishing speed, wrong orientation).
class RegularityError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class CornerMismatch : public Error {
 public:
  using Error::Error;
};

class NormError : public Error {
 public:
  using Error::Error;
};

class ProjectionDrift : public Error {
 public:
  using Error::Error;
};

class PeriodicityError : public Error {
 public:
  using Error::Error;
};

class FlatnessError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Raised by integrators that reach a finite-time singularity.
class SingularityStop : public Error {
 public:
  SingularityStop(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

}  // namespace unred
