#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace halo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " at byte " + std::to_string(offset)), msg_(msg), offset_(offset) {}
  std::size_t offset() const { return offset_; }
  const std::string& message() const { return msg_; }

 private:
  std::string msg_;
  std::size_t offset_;
};

// Precondition or invariant broken by the caller's input.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Memory, enumeration or word-length budget exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFamily : public Error {
 public:
  using Error::Error;
};

// A decomposition recursion could not make progress.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

}  // namespace halo
