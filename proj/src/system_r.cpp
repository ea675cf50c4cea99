#include "riam/system_r.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

#include "cursor.hpp"
#include "riam/error.hpp"

namespace riam::lambda {

struct Point::Node {
  std::string name;          // atoms
  std::optional<Multiset> args; // arrows
  std::optional<Point> result;
};

Point Point::atom(std::string name) {
  return Point(std::make_shared<const Node>(Node{std::move(name), std::nullopt, std::nullopt}));
}

Point Point::arrow(Multiset args, Point result) {
  return Point(std::make_shared<const Node>(Node{{}, std::move(args), std::move(result)}));
}

bool Point::is_atom() const { return !node_->args; }
const std::string& Point::name() const { return node_->name; }
const Multiset& Point::args() const { return *node_->args; }
const Point& Point::result() const { return *node_->result; }

std::strong_ordering operator<=>(const Point& a, const Point& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (a.is_atom() != b.is_atom()) return a.is_atom() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_atom()) return a.name() <=> b.name();
  if (auto c = a.args() <=> b.args(); c != 0) return c;
  return a.result() <=> b.result();
}

Multiset::Multiset(std::initializer_list<Point> points) : points_(points) { std::sort(points_.begin(), points_.end()); }

Multiset::Multiset(std::vector<Point> points) : points_(std::move(points)) { std::sort(points_.begin(), points_.end()); }

std::size_t Multiset::count(const Point& p) const {
  auto [lo, hi] = std::equal_range(points_.begin(), points_.end(), p);
  return static_cast<std::size_t>(hi - lo);
}

void Multiset::add(Point p) { points_.insert(std::upper_bound(points_.begin(), points_.end(), p), std::move(p)); }

bool Multiset::remove_one(const Point& p) {
  auto it = std::lower_bound(points_.begin(), points_.end(), p);
  if (it == points_.end() || !(*it == p)) return false;
  points_.erase(it);
  return true;
}

Multiset operator+(const Multiset& a, const Multiset& b) {
  Multiset out;
  std::merge(a.points_.begin(), a.points_.end(), b.points_.begin(), b.points_.end(), std::back_inserter(out.points_));
  return out;
}

std::optional<Multiset> difference(const Multiset& a, const Multiset& b) {
  Multiset out = a;
  for (const auto& p : b.points_) {
    if (!out.remove_one(p)) return std::nullopt;
  }
  return out;
}

std::strong_ordering operator<=>(const Multiset& a, const Multiset& b) {
  return std::lexicographical_compare_three_way(a.points_.begin(), a.points_.end(), b.points_.begin(),
                                                b.points_.end());
}

namespace {

Point parse_point_expr(detail::Cursor& in) {
  if (in.eat('(')) {
    Point p = parse_point_expr(in);
    in.expect(')');
    return p;
  }
  if (in.eat('*')) return Point::atom("*");
  if (in.eat('[')) {
    std::vector<Point> elements;
    if (!in.eat(']')) {
      elements.push_back(parse_point_expr(in));
      while (in.eat(',')) elements.push_back(parse_point_expr(in));
      in.expect(']');
    }
    in.expect("->");
    Point result = parse_point_expr(in);
    return Point::arrow(Multiset(std::move(elements)), std::move(result));
  }
  return Point::atom(in.ident());
}

} // namespace

Point parse_point(std::string_view text) {
  detail::Cursor in(text);
  Point p = parse_point_expr(in);
  in.expect_end();
  return p;
}

std::string to_string(const Multiset& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ", ";
    out += to_string(m.elements()[i]);
  }
  return out + "]";
}

std::string to_string(const Point& p) {
  if (p.is_atom()) return p.name();
  return to_string(p.args()) + " -> " + to_string(p.result());
}

bool refines(const Point& p, const Type& t) {
  if (p.is_atom()) return t.is_base();
  if (t.is_base()) return false;
  return refines(p.args(), t.domain()) && refines(p.result(), t.codomain());
}

bool refines(const Multiset& m, const Type& t) {
  return std::all_of(m.elements().begin(), m.elements().end(), [&](const Point& p) { return refines(p, t); });
}

namespace {

struct Scope {
  std::vector<std::string> names;
  std::vector<Type> types;

  std::optional<std::size_t> lookup(const std::string& name) const {
    for (std::size_t i = names.size(); i-- > 0;) {
      if (names[i] == name) return i;
    }
    return std::nullopt;
  }
};

// All sub-multisets of `m`.
std::vector<Multiset> sub_multisets(const Multiset& m) {
  std::vector<Multiset> out{Multiset{}};
  const auto& e = m.elements();
  for (std::size_t i = 0; i < e.size();) {
    std::size_t j = i;
    while (j < e.size() && e[j] == e[i]) ++j;
    std::vector<Multiset> next;
    for (const auto& base : out) {
      Multiset acc = base;
      next.push_back(acc);
      for (std::size_t k = i; k < j; ++k) {
        acc.add(e[i]);
        next.push_back(acc);
      }
    }
    out = std::move(next);
    i = j;
  }
  return out;
}

class Checker {
public:
  std::optional<Derivation> derive(Scope& scope, const std::vector<Multiset>& uses, const Term& m, const Type& type,
                                   const Point& point) {
    std::string key = memo_key(scope, uses, m, point);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::optional<Derivation> out = m.kind() == TermKind::Abs ? derive_abs(scope, uses, m, type, point)
                                                              : derive_head(scope, uses, m, point);
    memo_.emplace(std::move(key), out);
    return out;
  }

private:
  std::optional<Derivation> derive_abs(Scope& scope, const std::vector<Multiset>& uses, const Term& m,
                                       const Type& type, const Point& point) {
    if (point.is_atom()) throw PreconditionError("point " + to_string(point) + " does not refine " + to_string(type));
    scope.names.push_back(m.name());
    scope.types.push_back(m.binder_type());
    std::vector<Multiset> inner = uses;
    inner.push_back(point.args());
    auto body = derive(scope, inner, m.body(), type.codomain(), point.result());
    scope.names.pop_back();
    scope.types.pop_back();
    if (!body) return std::nullopt;
    return Derivation{Derivation::Rule::Abstraction, uses, point, 0, std::nullopt, {}, {std::move(*body)}};
  }

  struct Pending {
    std::size_t arg;
    Point element;
  };

  struct Spine {
    std::size_t head;
    std::vector<const Term*> args;
    std::vector<Type> arg_types;
    std::vector<std::vector<std::size_t>> visible; // per argument: context indices free in it
  };

  std::optional<Derivation> derive_head(Scope& scope, const std::vector<Multiset>& uses, const Term& m,
                                        const Point& point) {
    Spine spine;
    const Term* cur = &m;
    while (cur->kind() == TermKind::App) {
      spine.args.push_back(&cur->arg());
      cur = &cur->fun();
    }
    std::reverse(spine.args.begin(), spine.args.end());
    if (cur->kind() != TermKind::Var) throw PreconditionError("term is not β-normal: " + to_string(m));
    auto head = scope.lookup(cur->name());
    if (!head) throw PreconditionError("variable '" + cur->name() + "' is not in the context");
    spine.head = *head;

    Type t = scope.types[spine.head];
    for (std::size_t i = 0; i < spine.args.size(); ++i) {
      spine.arg_types.push_back(t.domain());
      t = t.codomain();
      std::vector<std::size_t> visible;
      for (const auto& name : free_vars(*spine.args[i])) {
        if (auto j = scope.lookup(name)) visible.push_back(*j);
      }
      spine.visible.push_back(std::move(visible));
    }

    const auto& candidates = uses[spine.head].elements();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (c > 0 && candidates[c] == candidates[c - 1]) continue;
      const Point& gamma = candidates[c];
      // gamma must read Y1 -> ... -> Yk -> point.
      std::vector<Pending> pending;
      const Point* p = &gamma;
      bool shape_ok = true;
      for (std::size_t i = 0; i < spine.args.size(); ++i) {
        if (p->is_atom()) {
          shape_ok = false;
          break;
        }
        for (const auto& e : p->args().elements()) pending.push_back({i, e});
        p = &p->result();
      }
      if (!shape_ok || !(*p == point)) continue;

      std::vector<Multiset> rest = uses;
      rest[spine.head].remove_one(gamma);
      Derivation d{Derivation::Rule::Head, uses, point, spine.head, gamma, {}, {}};
      if (split(scope, spine, pending, 0, rest, d)) return d;
    }
    return std::nullopt;
  }

  // Distributes `rest` over the pending element checks; every resource must
  // be consumed exactly once.
  bool split(Scope& scope, const Spine& spine, const std::vector<Pending>& pending, std::size_t next,
             const std::vector<Multiset>& rest, Derivation& d) {
    for (std::size_t j = 0; j < rest.size(); ++j) {
      if (rest[j].empty()) continue;
      bool consumable = false;
      for (std::size_t k = next; k < pending.size() && !consumable; ++k) {
        const auto& vis = spine.visible[pending[k].arg];
        consumable = std::find(vis.begin(), vis.end(), j) != vis.end();
      }
      if (!consumable) return false;
    }
    if (next == pending.size()) return true;

    const Pending& goal = pending[next];
    const auto& vis = spine.visible[goal.arg];
    std::vector<Multiset> share(rest.size());
    return choose(scope, spine, pending, next, rest, d, vis, 0, share);
  }

  bool choose(Scope& scope, const Spine& spine, const std::vector<Pending>& pending, std::size_t next,
              const std::vector<Multiset>& rest, Derivation& d, const std::vector<std::size_t>& vis, std::size_t v,
              std::vector<Multiset>& share) {
    if (v == vis.size()) {
      const Pending& goal = pending[next];
      auto premise = derive(scope, share, *spine.args[goal.arg], spine.arg_types[goal.arg], goal.element);
      if (!premise) return false;
      std::vector<Multiset> remaining = rest;
      for (std::size_t j = 0; j < rest.size(); ++j) remaining[j] = *difference(rest[j], share[j]);
      d.premises.push_back(std::move(*premise));
      d.premise_args.push_back(goal.arg);
      if (split(scope, spine, pending, next + 1, remaining, d)) return true;
      d.premises.pop_back();
      d.premise_args.pop_back();
      return false;
    }
    std::size_t j = vis[v];
    for (auto& sub : sub_multisets(rest[j])) {
      share[j] = std::move(sub);
      if (choose(scope, spine, pending, next, rest, d, vis, v + 1, share)) return true;
    }
    share[j] = Multiset{};
    return false;
  }

  static std::string memo_key(const Scope& scope, const std::vector<Multiset>& uses, const Term& m,
                              const Point& point) {
    std::string key = std::to_string(reinterpret_cast<std::uintptr_t>(m.id())) + '|' + std::to_string(scope.names.size());
    for (const auto& n : scope.names) key += ',' + n;
    key += '|' + to_string(point) + '|';
    for (const auto& u : uses) key += to_string(u) + ';';
    return key;
  }

  std::map<std::string, std::optional<Derivation>> memo_;
};

} // namespace

std::optional<Derivation> derive(const RContext& ctx, const Term& m, const Type& type, const Point& point) {
  if (!is_normal(m)) throw PreconditionError("term is not β-normal: " + to_string(m));
  if (!refines(point, type)) throw PreconditionError("point " + to_string(point) + " does not refine " + to_string(type));
  Scope scope;
  std::vector<Multiset> uses;
  TypeContext typing;
  for (const auto& entry : ctx) {
    if (!refines(entry.uses, entry.type)) {
      throw PreconditionError("context multiset for '" + entry.name + "' does not refine " + to_string(entry.type));
    }
    scope.names.push_back(entry.name);
    scope.types.push_back(entry.type);
    uses.push_back(entry.uses);
    typing.emplace_back(entry.name, entry.type);
  }
  Type actual = Type::base();
  try {
    actual = typecheck(typing, m);
  } catch (const TypeError& e) {
    throw PreconditionError(e.what());
  }
  if (!(actual == type)) throw PreconditionError("term has type " + to_string(actual) + ", not " + to_string(type));
  return Checker{}.derive(scope, uses, m, type, point);
}

bool check_judgment(const Term& m, const Type& type, const Point& point) {
  Type actual = typecheck({}, m);
  if (!(actual == type)) throw TypeError("term has type " + to_string(actual) + ", not " + to_string(type));
  return derive({}, normalize(m), type, point).has_value();
}

Point true_point() {
  Point star = Point::atom("*");
  return Point::arrow(Multiset{star}, Point::arrow(Multiset{}, star));
}

BoolVerdict boolean_eval(const Term& m) {
  return check_judgment(m, boolean_type(), true_point()) ? BoolVerdict::IsTrue : BoolVerdict::IsFalse;
}

} // namespace riam::lambda
