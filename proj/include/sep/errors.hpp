#pragma once

#include <stdexcept>
#include <string>

namespace sep {

/// Base type for every error thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text (edge lists, feature CSVs, tree JSON).
class ParseError : public Error {
public:
  using Error::Error;
};

/// Arguments outside the mathematical domain of an operation
/// (negative weights, edgeless graphs, heights below 2, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A tree edit or query whose structural precondition does not hold.
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Matrix dimension mismatch in the pooling algebra.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Filesystem-level failures.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace sep
