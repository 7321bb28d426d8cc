#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fwsvm {

// Base of every error thrown by the library. Index errors use std::out_of_range.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed dataset or model text. line() is 1-based; 0 means "whole input".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-positive or non-finite curvature in the line search, or similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fwsvm
