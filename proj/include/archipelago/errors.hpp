#pragma once

#include <stdexcept>
#include <string>

namespace archipelago {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or structural invariant was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (expressions, element literals, config files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  explicit ParseError(const std::string& what) : Error(what), position_(0) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A computation would exceed a configured size budget or overflow.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A letter map has no image for the requested element.
class MappingError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not available for the given factor groups.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// An involution met a target that has none (the case split of the
/// classification).
class ClassificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace archipelago
