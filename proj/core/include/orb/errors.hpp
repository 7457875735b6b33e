#pragma once

#include <stdexcept>
#include <string>

namespace orb {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad configuration, arguments, or violated preconditions (CLI exit code 2).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Malformed or inconsistent input data (CLI exit code 3).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

/// Parse failure in a structured file; carries the offending field name.
class ParseError : public DataError {
 public:
  ParseError(const std::string& field, const std::string& what)
      : DataError("parse error in field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace orb
