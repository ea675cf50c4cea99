#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "riam/formula.hpp"

namespace riam::rel {

enum class TermKind { Atom, Unit, Pair, Var };

/// A point of a web: an atom, the empty sequence `()`, a pair, or an atomic
/// variable (written `?name`). Immutable; subterms are shared.
class Term {
public:
  static Term atom(std::string name);
  static Term unit();
  static Term pair(Term fst, Term snd);
  static Term var(std::string name);

  TermKind kind() const;
  bool is_var() const { return kind() == TermKind::Var; }
  bool is_ground() const;
  std::size_t size() const;

  // Atom and Var only.
  const std::string& name() const;
  // Pair only.
  const Term& fst() const;
  const Term& snd() const;

  // Same underlying node; a cheap sufficient test for equality.
  bool same_node(const Term& other) const { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::string to_string(const Term& t);

/// Membership in the web |a|. With `allow_vars`, a variable is accepted at
/// every position (including unit positions, where the machine's fresh
/// variables may land); without it this is the variable-free web.
bool web_member(const Term& t, const mll::Formula& a, bool allow_vars);

/// Variable name (without the leading `?`) to its image.
using Substitution = std::map<std::string, Term>;

std::string to_string(const Substitution& s);

Term apply_subst(const Substitution& s, const Term& t);

/// Why two terms have no unifier.
struct Clash {
  enum class Reason { AtomClash, ConstructorClash, OccursCheck };
  Reason reason;
  Term left, right;
};

std::string to_string(const Clash& c);

/// Most general unifier, idempotent. On failure, reports the first clashing
/// subterms.
std::variant<Substitution, Clash> unify(const Term& a, const Term& b);

inline std::optional<Substitution> mgu(const Term& a, const Term& b) {
  auto r = unify(a, b);
  if (auto* s = std::get_if<Substitution>(&r)) return std::move(*s);
  return std::nullopt;
}

void collect_atoms(const Term& t, std::vector<std::string>& out);
void collect_vars(const Term& t, std::vector<std::string>& out);
bool occurs(const std::string& var, const Term& t);

/// Parses `t ::= ident | "()" | "(" t ")" | "(" t "," t ")" | "?" ident`.
Term parse_term(std::string_view text);

/// Parses a comma-separated list of conclusion points. When the text is a
/// single parenthesised tuple whose width equals `arity` (e.g. `(a,(a,b),b)`
/// for three conclusions), its components are taken as the points.
/// Throws ParseError, or PreconditionError on an arity mismatch.
std::vector<Term> parse_point(std::string_view text, std::size_t arity);

/// Generator of fresh variables `<prefix>0`, `<prefix>1`, ... A leading `?`
/// in the prefix is the concrete-syntax marker and is not part of the name.
class FreshNames {
public:
  explicit FreshNames(std::string_view prefix = "?_g");
  Term next();
  std::size_t issued() const { return counter_; }

private:
  std::string prefix_;
  std::size_t counter_ = 0;
};

} // namespace riam::rel
