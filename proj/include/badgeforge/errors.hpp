#pragma once

#include <stdexcept>
#include <string>

namespace badgeforge {

// Base class for all badgeforge errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside its documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Root bracketing failed: signs agree at both endpoints.
class NoBracket : public Error {
 public:
  using Error::Error;
};

// Iteration budget exhausted before reaching tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// Exact summation requested beyond the configured cap.
class Overflow : public Error {
 public:
  using Error::Error;
};

// Inversion target outside the function's range.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Operation requires a regular ability distribution.
class NotRegular : public Error {
 public:
  using Error::Error;
};

// Construction requires a different status shape class.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Structured optimal mechanisms exist only for beta in {0, 1/2, 1}.
class UnsupportedBeta : public Error {
 public:
  using Error::Error;
};

// Approximation ratio against a zero-contribution mechanism.
class DivisionDegenerate : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration limited to tiny populations.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration (CLI / config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace badgeforge
