#pragma once

#include <stdexcept>
#include <string>

namespace physbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared during integration.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// A simulation could not resolve its contacts; callers regenerate with the next sub-seed.
class SimulationFailure : public Error {
 public:
  using Error::Error;
};

/// Task is not defined for the given dataset.
class InvalidTask : public Error {
 public:
  using Error::Error;
};

/// Arguments violate an operation's preconditions (sizes, ranges, mismatched inputs).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Labels with zero variance cannot be normalized.
class DegenerateLabels : public Error {
 public:
  using Error::Error;
};

/// Base for on-disk dataset problems.
class DatasetError : public Error {
 public:
  using Error::Error;
};

class MissingFrameError : public DatasetError {
 public:
  explicit MissingFrameError(const std::string& path)
      : DatasetError("missing frame: " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class FormatError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class SchemaVersionError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class IoError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

}  // namespace physbench
