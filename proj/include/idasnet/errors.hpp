#pragma once

#include <stdexcept>
#include <string>

namespace idasnet {

// Tensor or container dimensions do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Duplicate or out-of-range codeword indices.
class CodewordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite value reached the optimizer or the loss.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable artifact file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace idasnet
