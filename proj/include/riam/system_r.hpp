#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riam/lambda.hpp"

namespace riam::lambda {

class Multiset;

/// A point of the relational interpretation of a simple type: an atom, or
/// `X -> a` with X a finite multiset of points.
class Point {
public:
  static Point atom(std::string name);
  static Point arrow(Multiset args, Point result);

  bool is_atom() const;
  const std::string& name() const; // atoms
  const Multiset& args() const;    // arrows
  const Point& result() const;     // arrows

  friend bool operator==(const Point& a, const Point& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Point& a, const Point& b);

private:
  struct Node;
  explicit Point(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Finite multiset, stored sorted so that equality ignores order and
/// respects multiplicity.
class Multiset {
public:
  Multiset() = default;
  Multiset(std::initializer_list<Point> points);
  explicit Multiset(std::vector<Point> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Point>& elements() const { return points_; }
  std::size_t count(const Point& p) const;

  void add(Point p);
  /// Removes one occurrence; false if absent.
  bool remove_one(const Point& p);
  /// Multiset sum.
  friend Multiset operator+(const Multiset& a, const Multiset& b);
  /// Multiset difference; nullopt unless `b` is contained in `a`.
  friend std::optional<Multiset> difference(const Multiset& a, const Multiset& b);

  friend bool operator==(const Multiset&, const Multiset&) = default;
  friend std::strong_ordering operator<=>(const Multiset& a, const Multiset& b);

private:
  std::vector<Point> points_;
};

/// `p ::= ident | "*" | "[" (p ("," p)*)? "]" "->" p | "(" p ")"`.
Point parse_point(std::string_view text);
std::string to_string(const Point& p);
std::string to_string(const Multiset& m);

bool refines(const Point& p, const Type& t);
bool refines(const Multiset& m, const Type& t);

struct ContextEntry {
  std::string name;
  Type type;
  Multiset uses;
};

using RContext = std::vector<ContextEntry>;

/// A System R derivation, kept so callers can audit resource accounting.
///
/// `Head` nodes cover both the variable rule (no premises) and applications
/// `y N1 ... Nk`: one occurrence of `head_element` is taken from the head's
/// multiset and the remaining context is split among the premises, one per
/// element of each argument multiset.
struct Derivation {
  enum class Rule { Abstraction, Head };
  Rule rule;
  std::vector<Multiset> context; // one multiset per context entry
  Point point;
  std::size_t head = 0;                   // Head: context index of the head variable
  std::optional<Point> head_element;      // Head
  std::vector<std::size_t> premise_args;  // Head: argument index checked by each premise
  std::vector<Derivation> premises;
};

/// Membership of (X1..Xn, point) in the interpretation of a β-normal `m`,
/// with non-idempotent context summation. Returns a derivation when one
/// exists. Throws PreconditionError if `m` is not normal, a variable is not
/// in `ctx`, or a point does not refine its type.
std::optional<Derivation> derive(const RContext& ctx, const Term& m, const Type& type, const Point& point);

inline bool check_point(const RContext& ctx, const Term& m, const Type& type, const Point& point) {
  return derive(ctx, m, type, point).has_value();
}

/// ⊳ m : point : type for a closed term: typechecks, normalises, then
/// checks in the empty context. Throws TypeError if `m` does not have `type`.
bool check_judgment(const Term& m, const Type& type, const Point& point);

enum class BoolVerdict { IsTrue, IsFalse };

/// [*] -> [] -> *
Point true_point();

/// Classifies a closed term of type o -> o -> o by whether it has the point
/// `[*] -> [] -> *`.
BoolVerdict boolean_eval(const Term& m);

} // namespace riam::lambda
