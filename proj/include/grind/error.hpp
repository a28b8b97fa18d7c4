#pragma once

#include <stdexcept>
#include <string>

namespace grind {

// Values double as CLI exit codes and C API status codes.
enum class ErrorKind : int {
  usage = 2,
  data = 3,
  numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Bad arguments or hyperparameters supplied by the caller.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Unreadable, malformed or insufficient input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// A solver could not certify its result.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Throws an error of the same class as `kind` with the given message.
[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& what) {
  switch (kind) {
    case ErrorKind::usage: throw UsageError(what);
    case ErrorKind::data: throw DataError(what);
    case ErrorKind::numeric: throw NumericError(what);
  }
  throw Error(kind, what);
}

}  // namespace grind
