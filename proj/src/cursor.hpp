#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "riam/error.hpp"

namespace riam::detail {

// Hand-rolled scanner shared by the small recursive-descent parsers.
class Cursor {
public:
  explicit Cursor(std::string_view text, std::size_t line = 0) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  // Next raw character, no whitespace skipping.
  char peek_raw() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  bool eat(std::string_view s) {
    skip_ws();
    if (text_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'" + found());
  }

  void expect(std::string_view s) {
    if (!eat(s)) fail("expected '" + std::string(s) + "'" + found());
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  bool at_ident() { return ident_start(peek()); }

  std::string ident() {
    if (!at_ident()) fail("expected identifier" + found());
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // Identifier or number (port and cell names may be purely numeric).
  std::string name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected name" + found());
    return std::string(text_.substr(start, pos_ - start));
  }

  std::size_t pos() const { return pos_; }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_, line_); }

  void expect_end() {
    if (!at_end()) fail("unexpected trailing input" + found());
  }

  std::string found() {
    skip_ws();
    if (pos_ >= text_.size()) return ", found end of input";
    return std::string(", found '") + text_[pos_] + "'";
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

} // namespace riam::detail
