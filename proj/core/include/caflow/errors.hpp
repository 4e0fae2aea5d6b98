#pragma once

#include <stdexcept>
#include <string>

namespace caflow {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be opened, read, or written.
class IoError : public Error {
public:
  using Error::Error;
};

// File exists but its bytes do not match the declared format.
class FormatError : public Error {
public:
  using Error::Error;
};

// Missing or invalid calibration sidecar (frame rate, pixel pitch).
class CalibrationError : public Error {
public:
  using Error::Error;
};

// Input is well-formed but too small for the requested operation
// (fewer than two frames, plane smaller than a kernel, ...).
class InsufficientDataError : public Error {
public:
  using Error::Error;
};

// Parameter outside its documented domain (even window, negative
// threshold, malformed ROI, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

// Index or window placement outside the addressable region.
class OutOfRangeError : public Error {
public:
  using Error::Error;
};

}  // namespace caflow
