#pragma once

#include <stdexcept>
#include <string>

namespace tnt {

// Base for every error the library raises. The CLI maps the concrete
// subclass onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (bad magic, truncation, bad field values).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tnt
