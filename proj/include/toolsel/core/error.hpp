#pragma once

#include <stdexcept>
#include <string>

namespace toolsel {

// Every error raised by the library carries the module it came from, so the
// CLI can report provenance without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Input violates a shape/range contract (dimension mismatch, bad argument).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A persistent format was malformed or inconsistent.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-finite loss, zero-norm vector, divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace toolsel
