#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace textdiv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input could not be read or decoded (missing file, bad UTF-8, empty corpus).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A malformed JSONL/CSV/pretagged record. `line()` is 1-based.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MissingFieldError : public InputError {
 public:
  MissingFieldError(std::string field, std::size_t line)
      : InputError("missing field '" + field + "'" +
                   (line ? " at line " + std::to_string(line) : std::string())),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A metric's precondition does not hold for the given corpus or parameters.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class TaggerError : public Error {
 public:
  using Error::Error;
};

/// Similarity or embedding backend failure.
class BackendError : public Error {
 public:
  using Error::Error;
};

class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Raised inside long pairwise computations when a stop was requested.
class CancelledError : public Error {
 public:
  CancelledError() : Error("computation cancelled") {}
};

}  // namespace textdiv
