#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riam {

// Malformed concrete syntax. `offset` is a byte offset into the parsed text
// (or a 1-based line number for line-oriented formats, see `line`).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t offset, std::size_t line = 0)
    : std::runtime_error(describe(message, offset, line)), message_(message), offset_(offset), line_(line) {}

  const std::string& message() const noexcept { return message_; }

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }

private:
  static std::string describe(const std::string& message, std::size_t offset, std::size_t line) {
    if (line > 0) return "line " + std::to_string(line) + ", column " + std::to_string(offset + 1) + ": " + message;
    return "column " + std::to_string(offset + 1) + ": " + message;
  }

  std::string message_;
  std::size_t offset_;
  std::size_t line_;
};

// A caller broke a documented precondition (wrong arity, non-ground point, ...).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace riam
