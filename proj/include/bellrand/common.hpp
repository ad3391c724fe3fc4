#pragma once

#include <stdexcept>
#include <string>

namespace bellrand {

// Hermiticity, normalization and positivity checks on dense operators.
inline constexpr double kTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Measurement outcome with (numerically) zero probability.
class ImpossibleOutcome : public Error {
 public:
  using Error::Error;
};

// Table or enumeration would exceed the configured size caps.
class SizeError : public Error {
 public:
  using Error::Error;
};

// A source model produced a conditional probability outside its band.
class ModelViolation : public Error {
 public:
  using Error::Error;
};

class SeedExhausted : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bellrand
