#pragma once

#include <stdexcept>
#include <string>

namespace rcs {

// Operand dimensions do not match an operator or transform.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter violates its documented range (q outside (0,1), a <= 2, ...).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file; carries the byte offset where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long byte_offset)
      : std::runtime_error(what + " (byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), byte_offset_(-1) {}
  long byte_offset() const { return byte_offset_; }

 private:
  long byte_offset_;
};

}  // namespace rcs
