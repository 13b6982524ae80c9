#pragma once

#include <stdexcept>
#include <string>

namespace mtw {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (e.g. +inf cost arc).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed arguments or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// No finite-cost coupling exists.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtw
