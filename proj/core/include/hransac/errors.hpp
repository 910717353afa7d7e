#pragma once

#include <stdexcept>
#include <string>

namespace hransac {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The DLT system is rank deficient (collinear or repeated points).
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

/// A projective map sent a point to the line at infinity.
class PointAtInfinity : public Error {
 public:
  using Error::Error;
};

class InsufficientPoints : public Error {
 public:
  using Error::Error;
};

class InvalidQuery : public Error {
 public:
  using Error::Error;
};

class InfeasibleParams : public Error {
 public:
  using Error::Error;
};

/// Evaluation was requested for a run that produced no homography.
class NoModel : public Error {
 public:
  using Error::Error;
};

/// Malformed input document.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hransac
