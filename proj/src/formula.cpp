#include "riam/formula.hpp"

#include <cassert>
#include <ostream>
#include <sstream>

#include "cursor.hpp"

namespace riam::mll {

struct Formula::Node {
  FormulaKind kind;
  std::string name;
  // Populated only for Tensor/Par; optional<> would need Formula complete here.
  std::shared_ptr<const Formula> left, right;
  std::size_t size = 1;
};

Formula Formula::var(std::string name) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Var, std::move(name), nullptr, nullptr}));
}

Formula Formula::dual_var(std::string name) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::DualVar, std::move(name), nullptr, nullptr}));
}

Formula Formula::one() {
  static const Formula f(std::make_shared<const Node>(Node{FormulaKind::One, {}, nullptr, nullptr}));
  return f;
}

Formula Formula::bot() {
  static const Formula f(std::make_shared<const Node>(Node{FormulaKind::Bot, {}, nullptr, nullptr}));
  return f;
}

Formula Formula::tensor(Formula left, Formula right) {
  std::size_t size = 1 + left.size() + right.size();
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Tensor, {},
    std::make_shared<const Formula>(std::move(left)), std::make_shared<const Formula>(std::move(right)), size}));
}

Formula Formula::par(Formula left, Formula right) {
  std::size_t size = 1 + left.size() + right.size();
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Par, {},
    std::make_shared<const Formula>(std::move(left)), std::make_shared<const Formula>(std::move(right)), size}));
}

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }

const Formula& Formula::left() const {
  assert(node_->left);
  return *node_->left;
}

const Formula& Formula::right() const {
  assert(node_->right);
  return *node_->right;
}

std::size_t Formula::size() const { return node_->size; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case FormulaKind::Var:
    case FormulaKind::DualVar: return a.name() == b.name();
    case FormulaKind::One:
    case FormulaKind::Bot: return true;
    case FormulaKind::Tensor:
    case FormulaKind::Par: return a.left() == b.left() && a.right() == b.right();
  }
  return false;
}

Formula dual(const Formula& a) {
  switch (a.kind()) {
    case FormulaKind::Var: return Formula::dual_var(a.name());
    case FormulaKind::DualVar: return Formula::var(a.name());
    case FormulaKind::One: return Formula::bot();
    case FormulaKind::Bot: return Formula::one();
    case FormulaKind::Tensor: return Formula::par(dual(a.left()), dual(a.right()));
    case FormulaKind::Par: return Formula::tensor(dual(a.left()), dual(a.right()));
  }
  return a;
}

namespace {

Formula parse_par(detail::Cursor& in);

Formula parse_atom(detail::Cursor& in) {
  if (in.eat('(')) {
    Formula inner = parse_par(in);
    in.expect(')');
    if (in.peek_raw() == '^') in.fail("negation applies to propositional variables only");
    return inner;
  }
  if (in.eat('1')) return Formula::one();
  if (!in.at_ident()) in.fail("expected formula" + in.found());
  std::string name = in.ident();
  if (name == "bot") return Formula::bot();
  if (in.peek_raw() == '^') {
    in.eat('^');
    if (in.peek_raw() == '^') in.fail("double negation is not written explicitly; use '" + name + "'");
    return Formula::dual_var(std::move(name));
  }
  return Formula::var(std::move(name));
}

Formula parse_tensor(detail::Cursor& in) {
  Formula left = parse_atom(in);
  if (in.eat('*')) return Formula::tensor(std::move(left), parse_tensor(in));
  return left;
}

Formula parse_par(detail::Cursor& in) {
  Formula left = parse_tensor(in);
  if (in.eat('|')) return Formula::par(std::move(left), parse_par(in));
  return left;
}

// Precedence levels: 1 = par, 2 = tensor, 3 = atomic.
void print(std::ostream& out, const Formula& a, int context) {
  switch (a.kind()) {
    case FormulaKind::Var: out << a.name(); return;
    case FormulaKind::DualVar: out << a.name() << '^'; return;
    case FormulaKind::One: out << '1'; return;
    case FormulaKind::Bot: out << "bot"; return;
    case FormulaKind::Tensor:
    case FormulaKind::Par: {
      int level = a.kind() == FormulaKind::Par ? 1 : 2;
      bool parens = context > level;
      if (parens) out << '(';
      print(out, a.left(), level + 1);
      out << (level == 1 ? " | " : " * ");
      print(out, a.right(), level);
      if (parens) out << ')';
      return;
    }
  }
}

} // namespace

Formula parse_formula(std::string_view text) {
  detail::Cursor in(text);
  Formula result = parse_par(in);
  in.expect_end();
  return result;
}

std::string to_string(const Formula& a) {
  std::ostringstream out;
  print(out, a, 0);
  return out.str();
}

std::ostream& operator<<(std::ostream& out, const Formula& a) {
  print(out, a, 0);
  return out;
}

} // namespace riam::mll
