#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cscore {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Invalid arguments, broken invariants, out-of-range configuration values.
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& message) : Error(message) {}
};

// Malformed binary or text payloads. Carries the byte offset (or line number
// for line-oriented formats) where parsing failed.
class ParseError : public Error {
  public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_ = 0;
};

// Filesystem failures: missing files, short writes, unreadable paths.
class IoError : public Error {
  public:
    explicit IoError(const std::string& message) : Error(message) {}
};

}  // namespace cscore
