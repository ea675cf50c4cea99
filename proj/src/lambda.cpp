#include "riam/lambda.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <variant>

#include "cursor.hpp"

namespace riam::lambda {

struct Type::Node {
  std::shared_ptr<const Type> domain, codomain; // both null for `o`
};

Type Type::base() {
  static const Type o(std::make_shared<const Node>(Node{nullptr, nullptr}));
  return o;
}

Type Type::arrow(Type domain, Type codomain) {
  return Type(std::make_shared<const Node>(
    Node{std::make_shared<const Type>(std::move(domain)), std::make_shared<const Type>(std::move(codomain))}));
}

bool Type::is_base() const { return !node_->domain; }

const Type& Type::domain() const {
  assert(!is_base());
  return *node_->domain;
}

const Type& Type::codomain() const {
  assert(!is_base());
  return *node_->codomain;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (a.is_base() || b.is_base()) return a.is_base() && b.is_base();
  return a.domain() == b.domain() && a.codomain() == b.codomain();
}

Type boolean_type() { return Type::arrow(Type::base(), Type::arrow(Type::base(), Type::base())); }

namespace {

Type parse_type_expr(detail::Cursor& in);

Type parse_type_atom(detail::Cursor& in) {
  if (in.eat('(')) {
    Type t = parse_type_expr(in);
    in.expect(')');
    return t;
  }
  std::size_t at = in.pos();
  std::string word = in.ident();
  if (word != "o") throw ParseError("unknown base type '" + word + "' (only 'o' exists)", at);
  return Type::base();
}

Type parse_type_expr(detail::Cursor& in) {
  Type left = parse_type_atom(in);
  if (in.eat("->")) return Type::arrow(std::move(left), parse_type_expr(in));
  return left;
}

void print_type(std::string& out, const Type& t) {
  if (t.is_base()) {
    out += 'o';
    return;
  }
  bool parens = !t.domain().is_base();
  if (parens) out += '(';
  print_type(out, t.domain());
  if (parens) out += ')';
  out += " -> ";
  print_type(out, t.codomain());
}

} // namespace

Type parse_type(std::string_view text) {
  detail::Cursor in(text);
  Type t = parse_type_expr(in);
  in.expect_end();
  return t;
}

std::string to_string(const Type& t) {
  std::string out;
  print_type(out, t);
  return out;
}

struct Term::Node {
  TermKind kind;
  std::string name;
  std::optional<Type> type;
  std::shared_ptr<const Term> left, right; // Abs: body in left; App: fun, arg
};

Term Term::var(std::string name) {
  return Term(std::make_shared<const Node>(Node{TermKind::Var, std::move(name), std::nullopt, nullptr, nullptr}));
}

Term Term::abs(std::string binder, Type binder_type, Term body) {
  return Term(std::make_shared<const Node>(
    Node{TermKind::Abs, std::move(binder), std::move(binder_type), std::make_shared<const Term>(std::move(body)), nullptr}));
}

Term Term::app(Term fun, Term arg) {
  return Term(std::make_shared<const Node>(Node{TermKind::App, {}, std::nullopt,
                                                std::make_shared<const Term>(std::move(fun)),
                                                std::make_shared<const Term>(std::move(arg))}));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
const Type& Term::binder_type() const { return *node_->type; }
const Term& Term::body() const { return *node_->left; }
const Term& Term::fun() const { return *node_->left; }
const Term& Term::arg() const { return *node_->right; }

namespace {

Term parse_lambda_term(detail::Cursor& in);

bool at_atom_start(detail::Cursor& in) { return in.at_ident() || in.peek() == '('; }

Term parse_atom(detail::Cursor& in) {
  if (in.eat('(')) {
    Term t = parse_lambda_term(in);
    in.expect(')');
    return t;
  }
  return Term::var(in.ident());
}

Term parse_lambda_term(detail::Cursor& in) {
  if (in.eat('\\')) {
    std::string binder = in.ident();
    in.expect(':');
    Type t = parse_type_expr(in);
    in.expect('.');
    return Term::abs(std::move(binder), std::move(t), parse_lambda_term(in));
  }
  Term head = parse_atom(in);
  while (true) {
    if (at_atom_start(in)) {
      head = Term::app(std::move(head), parse_atom(in));
    } else if (in.peek() == '\\') {
      return Term::app(std::move(head), parse_lambda_term(in));
    } else {
      return head;
    }
  }
}

void print_term(std::string& out, const Term& m) {
  switch (m.kind()) {
    case TermKind::Var: out += m.name(); return;
    case TermKind::Abs:
      out += '\\' + m.name() + ':' + to_string(m.binder_type()) + ". ";
      print_term(out, m.body());
      return;
    case TermKind::App: {
      bool fun_parens = m.fun().kind() == TermKind::Abs;
      bool arg_parens = m.arg().kind() != TermKind::Var;
      if (fun_parens) out += '(';
      print_term(out, m.fun());
      if (fun_parens) out += ')';
      out += ' ';
      if (arg_parens) out += '(';
      print_term(out, m.arg());
      if (arg_parens) out += ')';
      return;
    }
  }
}

} // namespace

Term parse_term(std::string_view text) {
  detail::Cursor in(text);
  Term m = parse_lambda_term(in);
  in.expect_end();
  return m;
}

std::string to_string(const Term& m) {
  std::string out;
  print_term(out, m);
  return out;
}

namespace {

bool alpha_equal_in(const Term& a, const Term& b, std::vector<std::string>& sa, std::vector<std::string>& sb) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Var: {
      auto ia = std::find(sa.rbegin(), sa.rend(), a.name());
      auto ib = std::find(sb.rbegin(), sb.rend(), b.name());
      bool free_a = ia == sa.rend(), free_b = ib == sb.rend();
      if (free_a || free_b) return free_a && free_b && a.name() == b.name();
      return ia - sa.rbegin() == ib - sb.rbegin();
    }
    case TermKind::Abs: {
      if (!(a.binder_type() == b.binder_type())) return false;
      sa.push_back(a.name());
      sb.push_back(b.name());
      bool eq = alpha_equal_in(a.body(), b.body(), sa, sb);
      sa.pop_back();
      sb.pop_back();
      return eq;
    }
    case TermKind::App:
      return alpha_equal_in(a.fun(), b.fun(), sa, sb) && alpha_equal_in(a.arg(), b.arg(), sa, sb);
  }
  return false;
}

void free_vars_in(const Term& m, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (m.kind()) {
    case TermKind::Var:
      if (std::find(bound.begin(), bound.end(), m.name()) == bound.end()) out.insert(m.name());
      return;
    case TermKind::Abs:
      bound.push_back(m.name());
      free_vars_in(m.body(), bound, out);
      bound.pop_back();
      return;
    case TermKind::App:
      free_vars_in(m.fun(), bound, out);
      free_vars_in(m.arg(), bound, out);
      return;
  }
}

} // namespace

bool alpha_equal(const Term& a, const Term& b) {
  std::vector<std::string> sa, sb;
  return alpha_equal_in(a, b, sa, sb);
}

std::set<std::string> free_vars(const Term& m) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  free_vars_in(m, bound, out);
  return out;
}

Type typecheck(const TypeContext& ctx, const Term& m) {
  switch (m.kind()) {
    case TermKind::Var: {
      for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
        if (it->first == m.name()) return it->second;
      }
      throw TypeError("unbound variable '" + m.name() + "'");
    }
    case TermKind::Abs: {
      TypeContext inner = ctx;
      inner.emplace_back(m.name(), m.binder_type());
      return Type::arrow(m.binder_type(), typecheck(inner, m.body()));
    }
    case TermKind::App: {
      Type f = typecheck(ctx, m.fun());
      Type a = typecheck(ctx, m.arg());
      if (f.is_base()) throw TypeError("'" + to_string(m.fun()) + "' has type o and cannot be applied");
      if (!(f.domain() == a)) {
        throw TypeError("argument '" + to_string(m.arg()) + "' has type " + to_string(a) + ", expected " +
                        to_string(f.domain()));
      }
      return f.codomain();
    }
  }
  throw TypeError("unreachable");
}

namespace {

std::string fresh_variant(std::string base, const std::function<bool(const std::string&)>& taken) {
  while (taken(base)) base += '\'';
  return base;
}

} // namespace

Term substitute(const Term& m, const std::string& x, const Term& value) {
  switch (m.kind()) {
    case TermKind::Var: return m.name() == x ? value : m;
    case TermKind::App: return Term::app(substitute(m.fun(), x, value), substitute(m.arg(), x, value));
    case TermKind::Abs: {
      if (m.name() == x) return m;
      std::set<std::string> fv_value = free_vars(value);
      std::set<std::string> fv_body = free_vars(m.body());
      if (!fv_body.count(x)) return m;
      if (!fv_value.count(m.name())) return Term::abs(m.name(), m.binder_type(), substitute(m.body(), x, value));
      std::string renamed = fresh_variant(m.name(), [&](const std::string& n) {
        return fv_value.count(n) || fv_body.count(n) || n == x;
      });
      Term body = substitute(m.body(), m.name(), Term::var(renamed));
      return Term::abs(renamed, m.binder_type(), substitute(body, x, value));
    }
  }
  return m;
}

std::optional<Term> reduce_step(const Term& m) {
  switch (m.kind()) {
    case TermKind::Var: return std::nullopt;
    case TermKind::Abs:
      if (auto body = reduce_step(m.body())) return Term::abs(m.name(), m.binder_type(), std::move(*body));
      return std::nullopt;
    case TermKind::App:
      if (m.fun().kind() == TermKind::Abs) return substitute(m.fun().body(), m.fun().name(), m.arg());
      if (auto fun = reduce_step(m.fun())) return Term::app(std::move(*fun), m.arg());
      if (auto arg = reduce_step(m.arg())) return Term::app(m.fun(), std::move(*arg));
      return std::nullopt;
  }
  return std::nullopt;
}

bool is_normal(const Term& m) {
  switch (m.kind()) {
    case TermKind::Var: return true;
    case TermKind::Abs: return is_normal(m.body());
    case TermKind::App: return m.fun().kind() != TermKind::Abs && is_normal(m.fun()) && is_normal(m.arg());
  }
  return true;
}

namespace {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct Env {
  std::string name;
  ValuePtr value;
  std::shared_ptr<const Env> next;
};
using EnvPtr = std::shared_ptr<const Env>;

struct Closure {
  std::string binder;
  Type type;
  Term body;
  EnvPtr env;
};

// Head is either a free variable (by name) or a read-back level.
struct Neutral {
  std::variant<std::string, std::size_t> head;
  std::vector<ValuePtr> spine;
};

struct Value {
  std::variant<Closure, Neutral> v;
};

ValuePtr eval(const Term& m, const EnvPtr& env);

ValuePtr apply_value(const ValuePtr& f, ValuePtr a) {
  if (const auto* c = std::get_if<Closure>(&f->v)) {
    return eval(c->body, std::make_shared<const Env>(Env{c->binder, std::move(a), c->env}));
  }
  Neutral n = std::get<Neutral>(f->v);
  n.spine.push_back(std::move(a));
  return std::make_shared<const Value>(Value{std::move(n)});
}

ValuePtr eval(const Term& m, const EnvPtr& env) {
  switch (m.kind()) {
    case TermKind::Var:
      for (const Env* e = env.get(); e; e = e->next.get()) {
        if (e->name == m.name()) return e->value;
      }
      return std::make_shared<const Value>(Value{Neutral{m.name(), {}}});
    case TermKind::Abs: return std::make_shared<const Value>(Value{Closure{m.name(), m.binder_type(), m.body(), env}});
    case TermKind::App: return apply_value(eval(m.fun(), env), eval(m.arg(), env));
  }
  return nullptr;
}

Term read_back(const ValuePtr& v, std::vector<std::string>& names, const std::set<std::string>& free) {
  if (const auto* c = std::get_if<Closure>(&v->v)) {
    std::string name = fresh_variant(c->binder, [&](const std::string& n) {
      return free.count(n) || std::find(names.begin(), names.end(), n) != names.end();
    });
    std::size_t level = names.size();
    ValuePtr arg = std::make_shared<const Value>(Value{Neutral{level, {}}});
    names.push_back(name);
    Term body = read_back(apply_value(v, arg), names, free);
    names.pop_back();
    return Term::abs(std::move(name), c->type, std::move(body));
  }
  const auto& n = std::get<Neutral>(v->v);
  Term head = std::holds_alternative<std::string>(n.head) ? Term::var(std::get<std::string>(n.head))
                                                          : Term::var(names[std::get<std::size_t>(n.head)]);
  for (const auto& a : n.spine) head = Term::app(std::move(head), read_back(a, names, free));
  return head;
}

} // namespace

Term normalize(const Term& m) {
  std::set<std::string> free = free_vars(m);
  std::vector<std::string> names;
  return read_back(eval(m, nullptr), names, free);
}

} // namespace riam::lambda
