#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nfmeter {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFormat : public Error {
public:
  using Error::Error;
};

/// A capture ended in the middle of a record.
class TruncatedFile : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Header or column layout does not match a known schema.
class SchemaError : public Error {
public:
  using Error::Error;
};

/// Inputs to a merge disagree on their column layout.
class SchemaMismatch : public SchemaError {
public:
  using SchemaError::SchemaError;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class EmptyFlow : public Error {
public:
  using Error::Error;
};

} // namespace nfmeter
