#pragma once

#include <stdexcept>
#include <string>

namespace vsrboost {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument, shape mismatch or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// File system, decode or encode failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed or unexpected bytes on the backend wire.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A backend refused or failed a batch. `code` follows the wire error codes
// (1 malformed, 2 unsupported scale, 3 internal); 0 when not remote.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, unsigned code = 0) : Error(what), code_(code) {}
  unsigned code() const noexcept { return code_; }

 private:
  unsigned code_;
};

}  // namespace vsrboost
