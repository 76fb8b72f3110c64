#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccts {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line()` is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Array shapes that do not agree (series vs mask, model vs input, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A value that violates a domain invariant (non-finite, out of range, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Requested operation is not defined for the given inputs.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccts
