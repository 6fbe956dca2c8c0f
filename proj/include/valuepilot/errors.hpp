#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace valuepilot {

/// One problem found while validating an input. `location` is a
/// human-readable path such as `scenarios[3].actions[1]`.
struct Violation {
  std::string location;
  std::string message;

  bool operator==(const Violation&) const = default;
};

std::string format_violations(const std::vector<Violation>& violations);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input values outside their documented domain. Carries every violation
/// found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::string message);
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<Violation> violations_;
};

/// Shapes that do not line up, e.g. a profile with 5 dimensions against a
/// scenario scored on 6.
class StructuralError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A metric was asked for over an empty input.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class GuardError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Failure talking to a remote assessor. `attempts` counts every request
/// issued, including the first.
class RemoteError : public Error {
 public:
  RemoteError(const std::string& what, int attempts)
      : Error(what), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class TransportError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

/// The server answered, but with a non-success status or a body that does
/// not satisfy the protocol.
class ProtocolError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

}  // namespace valuepilot
