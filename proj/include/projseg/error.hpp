#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace projseg {

/// Malformed or inconsistent input data (exit code 2 in the CLI).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A text input could not be parsed. Carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& reason, const std::string& source = {})
      : DataError((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

/// Invalid configuration or usage (exit code 1 in the CLI).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace projseg
