#pragma once

#include <stdexcept>
#include <string>

namespace probagen {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (XES, CSV, model file).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Bad user configuration: missing columns, unknown options, bad paths.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition on its input data does not hold.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace probagen
