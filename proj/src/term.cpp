#include "riam/term.hpp"

#include <cassert>
#include <optional>
#include <unordered_map>
#include <utility>

#include "cursor.hpp"
#include "riam/error.hpp"

namespace riam::rel {

struct Term::Node {
  TermKind kind;
  std::string name;
  std::optional<Term> fst, snd;
  bool ground = true;
  std::size_t size = 1;
};

Term Term::atom(std::string name) {
  return Term(std::make_shared<const Node>(Node{TermKind::Atom, std::move(name), std::nullopt, std::nullopt, true, 1}));
}

Term Term::unit() {
  static const Term u(std::make_shared<const Node>(Node{TermKind::Unit, {}, std::nullopt, std::nullopt, true, 1}));
  return u;
}

Term Term::pair(Term fst, Term snd) {
  bool ground = fst.is_ground() && snd.is_ground();
  std::size_t size = 1 + fst.size() + snd.size();
  return Term(std::make_shared<const Node>(Node{TermKind::Pair, {}, std::move(fst), std::move(snd), ground, size}));
}

Term Term::var(std::string name) {
  return Term(std::make_shared<const Node>(Node{TermKind::Var, std::move(name), std::nullopt, std::nullopt, false, 1}));
}

TermKind Term::kind() const { return node_->kind; }
bool Term::is_ground() const { return node_->ground; }
std::size_t Term::size() const { return node_->size; }
const std::string& Term::name() const { return node_->name; }

const Term& Term::fst() const {
  assert(node_->fst);
  return *node_->fst;
}

const Term& Term::snd() const {
  assert(node_->snd);
  return *node_->snd;
}

bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case TermKind::Atom:
    case TermKind::Var: return a.name() <=> b.name();
    case TermKind::Unit: return std::strong_ordering::equal;
    case TermKind::Pair:
      if (auto c = a.fst() <=> b.fst(); c != 0) return c;
      return a.snd() <=> b.snd();
  }
  return std::strong_ordering::equal;
}

namespace {

void print(std::string& out, const Term& t) {
  switch (t.kind()) {
    case TermKind::Atom: out += t.name(); return;
    case TermKind::Var: out += '?'; out += t.name(); return;
    case TermKind::Unit: out += "()"; return;
    case TermKind::Pair:
      out += '(';
      print(out, t.fst());
      out += ',';
      print(out, t.snd());
      out += ')';
      return;
  }
}

} // namespace

std::string to_string(const Term& t) {
  std::string out;
  print(out, t);
  return out;
}

bool web_member(const Term& t, const mll::Formula& a, bool allow_vars) {
  using mll::FormulaKind;
  if (t.is_var()) return allow_vars;
  switch (a.kind()) {
    case FormulaKind::Var:
    case FormulaKind::DualVar: return t.kind() == TermKind::Atom;
    case FormulaKind::One:
    case FormulaKind::Bot: return t.kind() == TermKind::Unit;
    case FormulaKind::Tensor:
    case FormulaKind::Par:
      return t.kind() == TermKind::Pair && web_member(t.fst(), a.left(), allow_vars) &&
             web_member(t.snd(), a.right(), allow_vars);
  }
  return false;
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s) {
    if (!first) out += ", ";
    first = false;
    out += '?' + v + '=' + to_string(t);
  }
  return out + "}";
}

Term apply_subst(const Substitution& s, const Term& t) {
  if (s.empty() || t.is_ground()) return t;
  if (t.is_var()) {
    auto it = s.find(t.name());
    return it == s.end() ? t : it->second;
  }
  // Only pairs can be non-ground apart from variables.
  Term fst = apply_subst(s, t.fst());
  Term snd = apply_subst(s, t.snd());
  if (fst.same_node(t.fst()) && snd.same_node(t.snd())) return t;
  return Term::pair(std::move(fst), std::move(snd));
}

std::string to_string(const Clash& c) {
  std::string what;
  switch (c.reason) {
    case Clash::Reason::AtomClash: what = "atom clash"; break;
    case Clash::Reason::ConstructorClash: what = "constructor clash"; break;
    case Clash::Reason::OccursCheck: what = "occurs check"; break;
  }
  return what + " " + to_string(c.left) + " vs " + to_string(c.right);
}

namespace {

// Triangular bindings built during unification; resolved at the end.
class Bindings {
public:
  const Term& walk(const Term& t) const {
    const Term* cur = &t;
    while (cur->is_var()) {
      auto it = map_.find(cur->name());
      if (it == map_.end()) break;
      cur = &it->second;
    }
    return *cur;
  }

  bool occurs(const std::string& v, const Term& t) const {
    if (t.is_ground()) return false;
    const Term& w = walk(t);
    if (w.is_var()) return w.name() == v;
    if (w.kind() != TermKind::Pair) return false;
    return occurs(v, w.fst()) || occurs(v, w.snd());
  }

  void bind(const std::string& v, Term t) { map_.emplace(v, std::move(t)); }

  Term resolve(const Term& t) const {
    if (t.is_ground()) return t;
    const Term& w = walk(t);
    if (w.is_var() || w.is_ground()) return w;
    Term fst = resolve(w.fst());
    Term snd = resolve(w.snd());
    if (fst.same_node(w.fst()) && snd.same_node(w.snd())) return w;
    return Term::pair(std::move(fst), std::move(snd));
  }

  Substitution solved() const {
    Substitution out;
    for (const auto& [v, t] : map_) out.emplace(v, resolve(t));
    return out;
  }

private:
  std::unordered_map<std::string, Term> map_;
};

} // namespace

std::variant<Substitution, Clash> unify(const Term& a, const Term& b) {
  Bindings bindings;
  std::vector<std::pair<Term, Term>> work{{a, b}};
  while (!work.empty()) {
    auto [l0, r0] = std::move(work.back());
    work.pop_back();
    Term l = bindings.walk(l0);
    Term r = bindings.walk(r0);
    if (l.same_node(r)) continue;
    if (l.is_var() && r.is_var() && l.name() == r.name()) continue;
    if (l.is_var() || r.is_var()) {
      const Term& v = l.is_var() ? l : r;
      const Term& other = l.is_var() ? r : l;
      if (bindings.occurs(v.name(), other)) return Clash{Clash::Reason::OccursCheck, l, r};
      bindings.bind(v.name(), other);
      continue;
    }
    if (l.kind() != r.kind()) return Clash{Clash::Reason::ConstructorClash, l, r};
    switch (l.kind()) {
      case TermKind::Atom:
        if (l.name() != r.name()) return Clash{Clash::Reason::AtomClash, l, r};
        break;
      case TermKind::Unit:
      case TermKind::Var: break;
      case TermKind::Pair:
        work.emplace_back(l.snd(), r.snd());
        work.emplace_back(l.fst(), r.fst());
        break;
    }
  }
  return bindings.solved();
}

void collect_atoms(const Term& t, std::vector<std::string>& out) {
  switch (t.kind()) {
    case TermKind::Atom: out.push_back(t.name()); return;
    case TermKind::Pair:
      collect_atoms(t.fst(), out);
      collect_atoms(t.snd(), out);
      return;
    default: return;
  }
}

void collect_vars(const Term& t, std::vector<std::string>& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    out.push_back(t.name());
    return;
  }
  collect_vars(t.fst(), out);
  collect_vars(t.snd(), out);
}

bool occurs(const std::string& var, const Term& t) {
  if (t.is_ground()) return false;
  if (t.is_var()) return t.name() == var;
  return occurs(var, t.fst()) || occurs(var, t.snd());
}

namespace {

Term parse_item(detail::Cursor& in) {
  if (in.eat('?')) {
    if (!detail::Cursor::ident_start(in.peek_raw())) in.fail("expected variable name after '?'");
    return Term::var(in.ident());
  }
  if (in.eat('(')) {
    if (in.eat(')')) return Term::unit();
    Term first = parse_item(in);
    if (in.eat(')')) return first;
    in.expect(',');
    Term second = parse_item(in);
    in.expect(')');
    return Term::pair(std::move(first), std::move(second));
  }
  return Term::atom(in.name());
}

std::vector<Term> parse_list(detail::Cursor& in) {
  std::vector<Term> items;
  if (in.at_end()) return items;
  items.push_back(parse_item(in));
  while (in.eat(',')) items.push_back(parse_item(in));
  return items;
}

} // namespace

Term parse_term(std::string_view text) {
  detail::Cursor in(text);
  Term t = parse_item(in);
  in.expect_end();
  return t;
}

std::vector<Term> parse_point(std::string_view text, std::size_t arity) {
  std::vector<Term> items;
  std::optional<ParseError> error;
  try {
    detail::Cursor in(text);
    items = parse_list(in);
    in.expect_end();
    if (items.size() == arity) return items;
  } catch (const ParseError& e) {
    error = e;
  }

  // Tuple reading: "(t1, ..., tn)" with n == arity.
  std::size_t open = text.find_first_not_of(" \t\r\n");
  std::size_t close = text.find_last_not_of(" \t\r\n");
  if (open != std::string_view::npos && text[open] == '(' && text[close] == ')' && close > open) {
    try {
      detail::Cursor in(text.substr(open + 1, close - open - 1));
      std::vector<Term> inner = parse_list(in);
      in.expect_end();
      if (inner.size() == arity) return inner;
    } catch (const ParseError&) {
    }
  }
  if (error) throw *error;
  throw PreconditionError("point has " + std::to_string(items.size()) + " components but the structure has " +
                          std::to_string(arity) + " conclusions");
}

FreshNames::FreshNames(std::string_view prefix) : prefix_(prefix) {
  if (!prefix_.empty() && prefix_.front() == '?') prefix_.erase(0, 1);
}

Term FreshNames::next() { return Term::var(prefix_ + std::to_string(counter_++)); }

} // namespace riam::rel
