#include "generators.hpp"
#include "riam/error.hpp"
#include "riam/lambda.hpp"
#include "riam/system_r.hpp"

#include <doctest.h>

using namespace riam;
using namespace riam::lambda;

namespace {

Term m(std::string_view s) { return parse_term(s); }
Type ty(std::string_view s) { return parse_type(s); }
Point pt(std::string_view s) { return parse_point(s); }

const char* kTrue = "\\x:o.\\y:o. x";
const char* kFalse = "\\x:o.\\y:o. y";

Term normalize_by_steps(Term t) {
  for (int i = 0; i < 100000; ++i) {
    auto next = reduce_step(t);
    if (!next) return t;
    t = *next;
  }
  throw std::runtime_error("reduction did not terminate");
}

// Closed types with closed normal inhabitants.
std::vector<Type> closed_types() {
  return {boolean_type(), ty("o -> o"), ty("(o -> o) -> o -> o"), ty("(o -> o -> o) -> o -> o"),
          ty("((o -> o) -> o) -> (o -> o) -> o"), ty("o -> (o -> o) -> o")};
}

} // namespace

TEST_SUITE("lambda") {

TEST_CASE("types") {
  CHECK(ty("o -> o -> o") == boolean_type());
  CHECK(ty("(o -> o) -> o") == Type::arrow(Type::arrow(Type::base(), Type::base()), Type::base()));
  CHECK(to_string(ty("(o -> o) -> o -> o")) == "(o -> o) -> o -> o");
  CHECK_THROWS_AS(ty("o ->"), ParseError);
  CHECK_THROWS_AS(ty("b"), ParseError);
}

TEST_CASE("term syntax") {
  Term k = m(kTrue);
  REQUIRE(k.kind() == TermKind::Abs);
  CHECK(k.name() == "x");
  CHECK(k.body().body().kind() == TermKind::Var);
  Term app = m("f x y");
  REQUIRE(app.kind() == TermKind::App);
  CHECK(app.fun().kind() == TermKind::App);
  CHECK(app.arg().name() == "y");
  CHECK(alpha_equal(m(to_string(m("(\\z:o->o. z) (\\w:o. w) v"))), m("(\\z:o->o. z) (\\w:o. w) v")));
  CHECK(alpha_equal(m("\\x:o. x"), m("\\y:o. y")));
  CHECK_FALSE(alpha_equal(m(kTrue), m(kFalse)));
  CHECK(free_vars(m("\\x:o. f x y")) == std::set<std::string>{"f", "y"});
  CHECK_THROWS_AS(m("\\x. x"), ParseError);
  CHECK_THROWS_AS(m("(f x"), ParseError);
}

TEST_CASE("type checking") {
  CHECK(typecheck({}, m(kTrue)) == boolean_type());
  CHECK(typecheck({{"y", Type::base()}}, m("(\\x:o. x) y")) == Type::base());
  CHECK(typecheck({{"x", boolean_type()}, {"x", Type::base()}}, m("x")) == Type::base());
  CHECK_THROWS_AS(typecheck({}, m("\\x:o. x x")), TypeError);
  CHECK_THROWS_AS(typecheck({}, m("y")), TypeError);
  CHECK_THROWS_AS(typecheck({{"f", ty("o -> o")}}, m("f f")), TypeError);
}

TEST_CASE("substitution avoids capture") {
  Term r = substitute(m("\\y:o. x"), "x", m("y"));
  CHECK(alpha_equal(r, m("\\z:o. y")));
  CHECK(free_vars(r) == std::set<std::string>{"y"});
  CHECK(alpha_equal(substitute(m("\\x:o. x"), "x", m("y")), m("\\x:o. x")));
}

TEST_CASE("normalisation examples") {
  CHECK(alpha_equal(normalize(m("(\\z:o. z) x")), m("x")));
  CHECK(alpha_equal(normalize(m(kTrue)), m(kTrue)));
  CHECK(alpha_equal(normalize(m("(\\f:o->o. \\x:o. f x) (\\y:o. y)")), m("\\x:o. x")));
  CHECK(alpha_equal(normalize(m("(\\f:o->o->o. \\a:o. \\b:o. f b a) (\\x:o.\\y:o. x)")), m(kFalse)));
  CHECK(alpha_equal(normalize(m("(\\x:o. \\y:o. x) y")), m("\\z:o. y")));
  CHECK(is_normal(m("\\x:o. f (g x)")));
  CHECK_FALSE(is_normal(m("f ((\\x:o. x) y)")));
}

TEST_CASE("reduction is leftmost outermost") {
  auto s = reduce_step(m("(\\x:o. x) ((\\y:o. y) z)"));
  REQUIRE(s);
  CHECK(alpha_equal(*s, m("(\\y:o. y) z")));
  CHECK_FALSE(reduce_step(m("f x")).has_value());
}

TEST_CASE("evaluation and step-wise reduction reach the same normal form") {
  testing::Rng rng(77);
  for (int i = 0; i < 400; ++i) {
    auto types = closed_types();
    Type t = types[i % types.size()];
    Term n = testing::random_normal_term(rng, {}, t, 4);
    REQUIRE(is_normal(n));
    Term r = testing::add_redexes(rng, n, {}, 1 + i % 4);
    CHECK(typecheck({}, r) == t);
    Term a = normalize(r), b = normalize_by_steps(r);
    CHECK(alpha_equal(a, b));
    CHECK(alpha_equal(a, n));
    CHECK(is_normal(a));
  }
}

TEST_CASE("points") {
  Point p = pt("[*] -> [] -> *");
  CHECK(p == true_point());
  CHECK(to_string(p) == "[*] -> [] -> *");
  CHECK(pt("[a, *] -> *") == pt("[*, a] -> *"));
  CHECK_FALSE(pt("[*, *] -> *") == pt("[*] -> *"));
  CHECK(refines(p, boolean_type()));
  CHECK_FALSE(refines(p, ty("o -> o")));
  CHECK(refines(pt("[[*] -> *, [a] -> *] -> [a] -> *"), ty("(o -> o) -> o -> o")));
  CHECK_THROWS_AS(pt("[*] ->"), ParseError);

  Multiset ms{pt("a"), pt("*")};
  CHECK(ms.count(pt("a")) == 1);
  CHECK(ms.remove_one(pt("a")));
  CHECK_FALSE(ms.remove_one(pt("a")));
  CHECK(difference(Multiset{pt("a"), pt("a")}, Multiset{pt("a")}) == Multiset{pt("a")});
  CHECK_FALSE(difference(Multiset{pt("a")}, Multiset{pt("b")}).has_value());
}

TEST_CASE("closed membership examples") {
  Type b = boolean_type();
  CHECK(check_point({}, m(kTrue), b, pt("[*] -> [] -> *")));
  CHECK_FALSE(check_point({}, m(kTrue), b, pt("[] -> [*] -> *")));
  CHECK(check_point({}, m(kFalse), b, pt("[] -> [*] -> *")));
  CHECK_FALSE(check_point({}, m(kFalse), b, true_point()));
  CHECK_FALSE(check_point({}, m(kTrue), b, pt("[*, *] -> [] -> *")));
  CHECK_FALSE(check_point({}, m(kTrue), b, pt("[a] -> [] -> *")));

  Type oo = ty("o -> o");
  CHECK(check_point({}, m("\\x:o. x"), oo, pt("[*] -> *")));
  CHECK_FALSE(check_point({}, m("\\x:o. x"), oo, pt("[*, *] -> *")));
  CHECK_FALSE(check_point({}, m("\\x:o. x"), oo, pt("[] -> *")));

  Type nat = ty("(o -> o) -> o -> o");
  Term two = m("\\f:o->o. \\x:o. f (f x)");
  CHECK(check_point({}, two, nat, pt("[[*] -> *, [*] -> *] -> [*] -> *")));
  CHECK(check_point({}, two, nat, pt("[[b] -> c, [a] -> b] -> [a] -> c")));
  CHECK_FALSE(check_point({}, two, nat, pt("[[*] -> *] -> [*] -> *")));
  CHECK_FALSE(check_point({}, two, nat, pt("[[a] -> b, [a] -> b] -> [a] -> b")));
}

TEST_CASE("open membership counts every use") {
  Type o = Type::base();
  auto ctx = [&](Multiset f, Multiset x) {
    return RContext{{"f", ty("o -> o"), std::move(f)}, {"x", o, std::move(x)}};
  };
  Term fx = m("f x");
  CHECK(check_point(ctx({pt("[*] -> *")}, {pt("*")}), fx, o, pt("*")));
  CHECK_FALSE(check_point(ctx({pt("[*] -> *")}, {}), fx, o, pt("*")));
  CHECK_FALSE(check_point(ctx({pt("[*] -> *")}, {pt("*"), pt("*")}), fx, o, pt("*")));
  CHECK_FALSE(check_point(ctx({pt("[*] -> *"), pt("[*] -> *")}, {pt("*")}), fx, o, pt("*")));
  CHECK(check_point(ctx({pt("[] -> *")}, {}), fx, o, pt("*")));
}

TEST_CASE("membership preconditions") {
  CHECK_THROWS_AS(check_point({}, m("(\\x:o. x) y"), Type::base(), pt("*")), PreconditionError);
  CHECK_THROWS_AS(check_point({}, m(kTrue), boolean_type(), pt("[*] -> *")), PreconditionError);
  CHECK_THROWS_AS(check_point({}, m("y"), Type::base(), pt("*")), PreconditionError);
}

TEST_CASE("judgments normalise first") {
  Type b = boolean_type();
  CHECK(check_judgment(m("(\\z:o->o->o. z) (\\x:o.\\y:o. x)"), b, true_point()));
  CHECK(check_judgment(m(kFalse), b, pt("[] -> [*] -> *")));
  CHECK_FALSE(check_judgment(m(kTrue), b, pt("[] -> [*] -> *")));
  CHECK_THROWS_AS(check_judgment(m("\\x:o. x"), b, true_point()), TypeError);
}

TEST_CASE("boolean evaluation") {
  CHECK(boolean_eval(m(kTrue)) == BoolVerdict::IsTrue);
  CHECK(boolean_eval(m(kFalse)) == BoolVerdict::IsFalse);
  CHECK(boolean_eval(m("(\\z:o->o->o. z) (\\x:o.\\y:o. y)")) == BoolVerdict::IsFalse);
  CHECK(boolean_eval(m("(\\p:o->o->o. \\a:o. \\b:o. p b a) (\\x:o.\\y:o. y)")) == BoolVerdict::IsTrue);
  CHECK_THROWS_AS(boolean_eval(m("\\x:o. x")), TypeError);
}

TEST_CASE("every sampled judgment is derivable and its derivation audits") {
  testing::Rng rng(5);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    TypeContext tctx;
    Term n = testing::random_head_term(rng, tctx);
    auto j = testing::sample_judgment(rng, tctx, n, Type::base());
    RContext ctx;
    for (std::size_t k = 0; k < tctx.size(); ++k) ctx.push_back({tctx[k].first, tctx[k].second, j.context[k]});
    auto d = derive(ctx, n, Type::base(), j.point);
    CAPTURE(to_string(n));
    CAPTURE(to_string(j.point));
    REQUIRE(d.has_value());
    CHECK(testing::audit_derivation(ctx, n, Type::base(), j.point, *d) == "");
    ++checked;
  }
  for (int i = 0; i < 300; ++i) {
    auto types = closed_types();
    Type t = types[i % types.size()];
    Term n = testing::random_normal_term(rng, {}, t, 4);
    auto j = testing::sample_judgment(rng, {}, n, t);
    auto d = derive({}, n, t, j.point);
    CAPTURE(to_string(n));
    CAPTURE(to_string(j.point));
    REQUIRE(d.has_value());
    CHECK(testing::audit_derivation({}, n, t, j.point, *d) == "");
  }
  CHECK(checked == 300);
}

TEST_CASE("derivations for random points audit, and failures are stable under reduction") {
  testing::Rng rng(8);
  int holds = 0;
  for (int i = 0; i < 600; ++i) {
    auto types = closed_types();
    Type t = types[i % types.size()];
    Term n = testing::random_normal_term(rng, {}, t, 4);
    Point p = testing::random_point(rng, t, 3);
    auto d = derive({}, n, t, p);
    if (d) {
      ++holds;
      CHECK(testing::audit_derivation({}, n, t, p, *d) == "");
    }
    Term r = testing::add_redexes(rng, n, {}, 1 + i % 3);
    CHECK(check_judgment(r, t, p) == d.has_value());
    auto once = reduce_step(r);
    REQUIRE(once);
    CHECK(check_judgment(*once, t, p) == d.has_value());
  }
  CHECK(holds > 20);
}

}
