#pragma once

#include <stdexcept>
#include <string>

namespace rscorrect {

// Base of every error raised by the library. The CLI maps these to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// A row capture time is not bracketed by the available GS frames.
class CoverageError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace rscorrect
