#pragma once

#include <stdexcept>
#include <string>

namespace mignet {

/// Failure categories. Each maps to a distinct CLI exit code.
enum class ErrorKind {
  Io,            // unreadable / unwritable path
  EmptyInput,    // a reader produced zero valid records
  MissingInput,  // a pipeline stage ran before the stage that feeds it
  NotFound,      // unknown key (user id, node)
  Validation,    // schema or precondition violation
  Numeric,       // non-convergence, degenerate fit, undefined quantity
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::MissingInput: return "missing_input";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Numeric: return "numeric";
  }
  return "unknown";
}

/// Process exit status for each failure kind. 0 is success, 1 an internal
/// error and 2 a command-line usage error.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingInput: return 3;
    case ErrorKind::Validation: return 4;
    case ErrorKind::Numeric: return 5;
    case ErrorKind::Io: return 6;
    case ErrorKind::EmptyInput: return 7;
    case ErrorKind::NotFound: return 8;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& what)
      : Error(ErrorKind::EmptyInput, what) {}
};

class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& what)
      : Error(ErrorKind::MissingInput, what) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& what)
      : Error(ErrorKind::NotFound, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Validation, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::Numeric, what) {}
};

}  // namespace mignet
