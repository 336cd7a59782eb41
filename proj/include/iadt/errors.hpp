#ifndef IADT_ERRORS_HPP
#define IADT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace iadt {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside its documented domain (bad count, dim too large, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message names the offending row/column.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Elimination hit a pivot below tolerance.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Data that is well formed but unusable for the request (no labels, empty selection).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace iadt

#endif  // IADT_ERRORS_HPP
