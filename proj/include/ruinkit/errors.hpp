#pragma once

#include <stdexcept>
#include <string>

namespace ruinkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial probability vector is not a probability vector.
class NonStochasticInitial : public Error {
 public:
  using Error::Error;
};

/// Sub-generator invariant violated (sign, row sum, or invertibility).
class InvalidSubgenerator : public Error {
 public:
  using Error::Error;
};

/// Block or vector shapes do not line up.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A resolvent (x I - A) could not be factorized.
class SingularResolvent : public Error {
 public:
  using Error::Error;
};

/// The two coefficient spectra of a Sylvester equation overlap numerically.
class SylvesterFailure : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure or eigenvalue outside its guaranteed region.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration exceeded its iteration budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Claim-count truncation grew past the configured cap.
class TruncationLimit : public Error {
 public:
  TruncationLimit(const std::string& what, double last_value, std::size_t last_s)
      : Error(what), last_value_(last_value), last_s_(last_s) {}

  double last_value() const { return last_value_; }
  std::size_t last_truncation() const { return last_s_; }

 private:
  double last_value_;
  std::size_t last_s_;
};

/// Invalid run configuration; the message starts with the field path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace ruinkit
