#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asdnk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text; offset is a byte position into the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Point outside the declared chart domain, inside an excluded band, or
// too close to a grid boundary for the stencil.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Division by zero, log of a non-positive number, or any other
// non-finite intermediate.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class OrderError : public Error {
 public:
  using Error::Error;
};

// Degenerate metric, coframe, grid or linear system.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace asdnk
