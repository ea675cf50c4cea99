#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

namespace riam::mll {

enum class FormulaKind { Var, DualVar, One, Bot, Tensor, Par };

/// An MLL formula. Immutable and cheap to copy (shared structure).
///
/// Negation is stored only on propositional variables; the dual of a compound
/// formula is always computed with `dual`.
class Formula {
public:
  static Formula var(std::string name);
  static Formula dual_var(std::string name);
  static Formula one();
  static Formula bot();
  static Formula tensor(Formula left, Formula right);
  static Formula par(Formula left, Formula right);

  FormulaKind kind() const;
  bool is_literal() const { return kind() == FormulaKind::Var || kind() == FormulaKind::DualVar; }
  bool is_binary() const { return kind() == FormulaKind::Tensor || kind() == FormulaKind::Par; }

  // Only meaningful for literals.
  const std::string& name() const;
  // Only meaningful for Tensor/Par.
  const Formula& left() const;
  const Formula& right() const;

  // Number of nodes in the formula tree.
  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Linear negation via De Morgan; involutive.
Formula dual(const Formula& a);

/// Parses `F ::= ident | ident "^" | "1" | "bot" | F "*" F | F "|" F | "(" F ")"`.
/// `*` binds tighter than `|`; both associate to the right. Throws ParseError.
Formula parse_formula(std::string_view text);

std::string to_string(const Formula& a);
std::ostream& operator<<(std::ostream& out, const Formula& a);

} // namespace riam::mll
