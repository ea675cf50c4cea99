#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace riam::lambda {

/// Simple types over the single base type `o`.
class Type {
public:
  static Type base();
  static Type arrow(Type domain, Type codomain);

  bool is_base() const;
  const Type& domain() const;
  const Type& codomain() const;

  friend bool operator==(const Type& a, const Type& b);

private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Church booleans: o -> o -> o.
Type boolean_type();

/// `T ::= "o" | T "->" T | "(" T ")"`, arrows associate to the right.
Type parse_type(std::string_view text);
std::string to_string(const Type& t);

enum class TermKind { Var, Abs, App };

/// Church-style λ-term: binders carry their type.
class Term {
public:
  static Term var(std::string name);
  static Term abs(std::string binder, Type binder_type, Term body);
  static Term app(Term fun, Term arg);

  TermKind kind() const;
  const std::string& name() const;   // Var: the variable; Abs: the binder
  const Type& binder_type() const;   // Abs
  const Term& body() const;          // Abs
  const Term& fun() const;           // App
  const Term& arg() const;           // App

  // Identity of the shared node; used as a memo key.
  const void* id() const { return node_.get(); }

private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// `M ::= "\" x ":" T "." M | M M | x | "(" M ")"`; application is left
/// associative and a λ extends as far right as possible.
Term parse_term(std::string_view text);
std::string to_string(const Term& m);

bool alpha_equal(const Term& a, const Term& b);
std::set<std::string> free_vars(const Term& m);

using TypeContext = std::vector<std::pair<std::string, Type>>;

class TypeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The simple type of `m` under `ctx` (later entries shadow earlier ones).
/// Throws TypeError on unbound variables or mismatched applications.
Type typecheck(const TypeContext& ctx, const Term& m);

/// Capture-avoiding m[x := value].
Term substitute(const Term& m, const std::string& x, const Term& value);

/// One leftmost-outermost β-step, or nullopt if `m` is normal.
std::optional<Term> reduce_step(const Term& m);

bool is_normal(const Term& m);

/// β-normal form by evaluation into a semantic domain and read-back.
/// Terminates on simply-typed input.
Term normalize(const Term& m);

} // namespace riam::lambda
