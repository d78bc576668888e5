#pragma once

#include <stdexcept>
#include <string>

namespace cmdp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array shapes of two objects do not agree (policy vs model, etc).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A model, policy or occupancy measure violates one of its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document (model file, config, policy file, map).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An experiment configuration is missing fields or has out-of-range values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The constraints of a CMDP cannot be satisfied by any policy.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Greedy-policy enumeration would exceed the configured cap.
class BlowupError : public Error {
 public:
  using Error::Error;
};

/// The simplex solver could not certify its answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A policy puts mass on actions outside the support it is decomposed over.
class SupportError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmdp
