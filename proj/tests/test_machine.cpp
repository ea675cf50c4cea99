#include "generators.hpp"
#include "riam/error.hpp"
#include "riam/experiment.hpp"
#include "riam/machine.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

using namespace riam;
using namespace riam::machine;
using rel::parse_point;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

IndexedStructure load(const std::string& name) {
  return IndexedStructure(mll::parse_proof_structure(slurp(std::string(RIAM_DATA_DIR) + "/" + name)));
}

IndexedStructure inline_structure(const char* text) { return IndexedStructure(mll::parse_proof_structure(text)); }

Term t(std::string_view s) { return rel::parse_term(s); }

Series plus(std::string_view s) { return Series::single(t(s), +1); }
Series minus(std::string_view s) { return Series::single(t(s), -1); }

std::string run_trace(const IndexedStructure& ps, std::string_view point) {
  auto x = parse_point(point, ps.conclusions().size());
  return format_trace(ps, normal_run(ps, x));
}

std::vector<std::string> fired_cells(const IndexedStructure& ps, const RunResult& r) {
  std::vector<std::string> out;
  for (auto& e : r.trace)
    if (auto* d = std::get_if<DispEvent>(&e)) out.push_back(ps.cell(d->cell).id);
  return out;
}

bool every_term_in_web(const IndexedStructure& ps, const Configuration& x) {
  for (PortIndex p = 0; p < ps.port_count(); ++p)
    for (auto& e : x.ports[p].entries())
      if (!rel::web_member(e.term, ps.port_type(p), true)) return false;
  return true;
}

// Runs the machine on `x` and checks every trace-level invariant that does
// not need an oracle. Returns the run.
RunResult run_and_audit(const IndexedStructure& ps, const std::vector<Term>& x) {
  RunResult r = normal_run(ps, x);
  Configuration start = initial_config(ps, x);
  std::vector<Configuration> states;
  bool overflowed = r.reason.starts_with("coefficient overflow");
  if (!overflowed) {
    REQUIRE_NOTHROW(states = replay(ps, start, r.trace));
    CHECK((states.empty() ? start : states.back()) == r.final_config);
  }
  if (r.accepted) {
    CHECK(r.final_config.is_zero());
    CHECK(r.displacements <= 2 * ps.cell_count());
    CHECK(r.reason.empty());
  } else {
    CHECK_FALSE(r.reason.empty());
  }

  std::size_t disp = 0, unif = 0;
  for (auto& e : r.trace) (std::holds_alternative<DispEvent>(e) ? disp : unif)++;
  CHECK(disp == r.displacements);
  CHECK(unif == r.unifications);

  for (auto& s : states) CHECK(every_term_in_web(ps, s));

  // Before each displacement every opposite pair has been unified, and a
  // displacement followed by its unifications zeroes some port.
  std::vector<std::size_t> disp_at;
  for (std::size_t i = 0; i < r.trace.size(); ++i)
    if (std::holds_alternative<DispEvent>(r.trace[i])) disp_at.push_back(i);
  auto state_before = [&](std::size_t i) -> const Configuration& { return i == 0 ? start : states[i - 1]; };
  if (!overflowed) {
    for (std::size_t k = 0; k < disp_at.size(); ++k) {
      const Configuration& before = state_before(disp_at[k]);
      for (auto& s : before.ports) CHECK_FALSE(s.opposite_pair().has_value());
      bool settled = k + 1 < disp_at.size() || r.accepted;
      if (!settled) continue;
      const Configuration& after = k + 1 < disp_at.size() ? state_before(disp_at[k + 1]) : states.back();
      bool zeroed = false;
      for (PortIndex p = 0; p < ps.port_count(); ++p)
        zeroed = zeroed || (!before.ports[p].is_zero() && after.ports[p].is_zero());
      CHECK(zeroed);
    }
  }
  return r;
}

} // namespace

TEST_SUITE("machine") {

TEST_CASE("series arithmetic stays within {-1, 0, +1}") {
  auto s = series_add(plus("a"), minus("(a,b)"));
  REQUIRE(s);
  CHECK(s->size() == 2);
  CHECK(s->coefficient(t("a")) == 1);
  CHECK(s->coefficient(t("(a,b)")) == -1);
  CHECK(s->coefficient(t("b")) == 0);
  CHECK(to_string(*s) == "+a -(a,b)");

  auto z = series_add(plus("a"), minus("a"));
  REQUIRE(z);
  CHECK(z->is_zero());
  CHECK(to_string(*z) == "0");
  CHECK_FALSE(series_add(plus("a"), plus("a")).has_value());
  CHECK_FALSE(series_add(minus("?x"), minus("?x")).has_value());

  auto pair = series_add(plus("b"), minus("?x"))->opposite_pair();
  REQUIRE(pair);
  CHECK(pair->first == t("b"));
  CHECK(pair->second == t("?x"));
  CHECK_FALSE(plus("a").opposite_pair().has_value());
}

TEST_CASE("substitution on series merges and may overflow") {
  auto s = *series_add(plus("?x"), minus("a"));
  auto merged = apply_subst(rel::Substitution{{"x", t("a")}}, s);
  REQUIRE(merged);
  CHECK(merged->is_zero());
  auto both = *series_add(plus("?x"), plus("a"));
  CHECK_FALSE(apply_subst(rel::Substitution{{"x", t("a")}}, both).has_value());
}

TEST_CASE("initial configuration puts the point on the conclusions") {
  auto ps = load("fig6.mllps");
  auto x = initial_config(ps, parse_point("a,(a,b),b", 3));
  CHECK(x.ports[*ps.find_port("1")] == plus("a"));
  CHECK(x.ports[*ps.find_port("2")].is_zero());
  CHECK(x.ports[*ps.find_port("3")] == plus("(a,b)"));
  CHECK(x.ports[*ps.find_port("5")] == plus("b"));
  CHECK(to_string(ps, x) == "{1: +a, 3: +(a,b), 5: +b}");
  CHECK_THROWS_AS(initial_config(ps, parse_point("a,b", 2)), PreconditionError);
  auto fig3 = load("fig3.mllps");
  auto y = initial_config(fig3, parse_point("((a,b)),((a,b))", 2));
  CHECK(std::count_if(y.ports.begin(), y.ports.end(), [](const Series& s) { return !s.is_zero(); }) == 2);
  CHECK_THROWS_AS(initial_config(ps, std::vector<Term>{t("a"), t("a"), t("b")}), PreconditionError);
}

TEST_CASE("displacement instances follow the cell rules") {
  auto ps = load("fig6.mllps");
  auto x = initial_config(ps, parse_point("a,(a,b),b", 3));
  rel::FreshNames fresh;

  auto ax12 = *ps.find_cell("ax12");
  auto ds = delta_instances(ps, ax12, x, fresh);
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].witness == t("a"));
  auto y = step_displacement(x, ds[0]);
  REQUIRE(y);
  CHECK(y->ports[*ps.find_port("1")].is_zero());
  CHECK(y->ports[*ps.find_port("2")] == minus("a"));

  auto ten = *ps.find_cell("t");
  auto dt = delta_instances(ps, ten, *y, fresh);
  REQUIRE(dt.size() == 1);
  CHECK(dt[0].witness == t("(?_g0,?_g1)"));
  auto z = step_displacement(*y, dt[0]);
  REQUIRE(z);
  CHECK(z->ports[*ps.find_port("2")] == *series_add(minus("a"), plus("?_g0")));
  CHECK(z->ports[*ps.find_port("4")] == plus("?_g1"));
  CHECK(z->ports[*ps.find_port("3")] == *series_add(plus("(a,b)"), minus("(?_g0,?_g1)")));

  // Unifying at port 3 closes ports 2 and 3 and leaves +b on port 4.
  auto u = step_unification(*z, *ps.find_port("3"));
  REQUIRE(std::holds_alternative<Unified>(u));
  auto& w = std::get<Unified>(u);
  CHECK(w.subst == rel::Substitution{{"_g0", t("a")}, {"_g1", t("b")}});
  CHECK(w.next.ports[*ps.find_port("2")].is_zero());
  CHECK(w.next.ports[*ps.find_port("3")].is_zero());
  CHECK(w.next.ports[*ps.find_port("4")] == plus("b"));

  // The same axiom cannot fire twice on one token.
  CHECK_FALSE(step_displacement(*y, ds[0]).has_value());

  // Nothing drives the right axiom until its port carries a `+` token.
  CHECK(delta_instances(ps, *ps.find_cell("ax45"), initial_config(ps, parse_point("a,(a,b),b", 3)), fresh).size() == 1);
  CHECK(delta_instances(ps, *ps.find_cell("ax45"), Configuration{std::vector<Series>(5)}, fresh).empty());
}

TEST_CASE("explicit displacements for each cell kind") {
  auto ps = inline_structure(R"(
    port p : X
    port q : X^
    port u : 1
    port w : X * 1
    cell a : ax(p, q)
    cell one : one(u)
    cell ten : tensor(p, u ; w)
    conclusions: q, w
  )");
  auto ax = displacement_for(ps, *ps.find_cell("a"), t("c"));
  REQUIRE(ax.per_port.size() == 2);
  for (auto& [p, s] : ax.per_port) CHECK(s == minus("c"));

  auto unit = displacement_for(ps, *ps.find_cell("one"), Term::unit());
  REQUIRE(unit.per_port.size() == 1);
  CHECK(unit.per_port[0].second == minus("()"));

  auto ten = displacement_for(ps, *ps.find_cell("ten"), t("(?v,?w)"));
  std::set<std::string> rendered;
  for (auto& [p, s] : ten.per_port) rendered.insert(ps.port_id(p) + ":" + to_string(s));
  CHECK(rendered == std::set<std::string>{"p:+?v", "u:+?w", "w:-(?v,?w)"});
  CHECK_THROWS(displacement_for(ps, *ps.find_cell("ten"), t("(a,?w)")));
}

TEST_CASE("cut displacement turns two downward tokens upward") {
  auto ps = load("isolated_loop.mllps");
  auto d = displacement_for(ps, *ps.find_cell("c"), t("a"));
  REQUIRE(d.per_port.size() == 2);
  for (auto& [p, s] : d.per_port) CHECK(s == plus("a"));
}

TEST_CASE("unification transition") {
  Configuration x{{*series_add(plus("(?x,b)"), minus("(a,?y)")), plus("(?x,?y)")}};
  auto r = step_unification(x, 0);
  REQUIRE(std::holds_alternative<Unified>(r));
  auto& u = std::get<Unified>(r);
  CHECK(u.subst == rel::Substitution{{"x", t("a")}, {"y", t("b")}});
  CHECK(u.next.ports[0].is_zero());
  CHECK(u.next.ports[1] == plus("(a,b)"));

  Configuration clash{{*series_add(plus("a"), minus("b"))}};
  auto s = step_unification(clash, 0);
  REQUIRE(std::holds_alternative<Stuck>(s));
  CHECK(std::get<Stuck>(s).reason.find("atom clash") != std::string::npos);

  CHECK(std::holds_alternative<Stuck>(step_unification(Configuration{{plus("a")}}, 0)));

  auto v = step_unification(Configuration{{*series_add(plus("?v"), minus("a"))}}, 0);
  REQUIRE(std::holds_alternative<Unified>(v));
  CHECK(std::get<Unified>(v).subst == rel::Substitution{{"v", t("a")}});
  CHECK(std::get<Unified>(v).next.ports[0].is_zero());
}

TEST_CASE("the recognition word of the three-conclusion example") {
  auto ps = load("fig6.mllps");
  CHECK(run_trace(ps, "(a,(a,b),b)") == slurp(std::string(RIAM_GOLDEN_DIR) + "/fig6.trace"));
  CHECK(run_trace(ps, "a,(a,b),b") == slurp(std::string(RIAM_GOLDEN_DIR) + "/fig6.trace"));
  CHECK_FALSE(check(ps, parse_point("a,(b,b),b", 3)));
  CHECK_FALSE(check(ps, parse_point("a,(a,b),a", 3)));
}

TEST_CASE("cut-elimination example accepts the identity and rejects the rest") {
  auto ps = load("fig3.mllps");
  auto ok = normal_run(ps, parse_point("(a,b),(a,b)", 2));
  CHECK(ok.accepted);
  auto cells = fired_cells(ps, ok);
  CHECK(std::multiset<std::string>(cells.begin(), cells.end()) ==
        std::multiset<std::string>{"axA", "axB", "axop", "cut", "par", "tens"});

  auto bad = normal_run(ps, parse_point("(a,b),(a,c)", 2));
  CHECK_FALSE(bad.accepted);
  CHECK(bad.reason == "clash at port ApB: +(a,c) vs -(a,b) (atom clash c vs b)");
  CHECK(format_trace(ps, bad).ends_with("REJECT clash at port ApB: +(a,c) vs -(a,b) (atom clash c vs b)\n"));
  CHECK_FALSE(bad.final_config.is_zero());
}

TEST_CASE("hidden cycle is handled with variable-only tokens") {
  auto ps = load("fig5.mllps");
  auto ok = normal_run(ps, parse_point("a,a", 2));
  CHECK(ok.accepted);
  bool var_only = false;
  for (auto& e : ok.trace)
    if (auto* u = std::get_if<UnifEvent>(&e))
      for (auto& [v, img] : u->subst) var_only = var_only || img.is_var();
  CHECK(var_only);
  CHECK_FALSE(check(ps, parse_point("a,b", 2)));
}

TEST_CASE("units, isolated loops and empty conclusions") {
  auto unit = inline_structure("port p : 1\ncell u : one(p)\nconclusions: p\n");
  CHECK(run_trace(unit, "()") == "DISP u witness=()\nACCEPT\n");
  auto bot = inline_structure("port p : bot\ncell u : bot(p)\nconclusions: p\n");
  CHECK(check(bot, parse_point("()", 1)));

  auto loop = load("isolated_loop.mllps");
  CHECK(check(loop, parse_point("a,a", 2)));
  CHECK_FALSE(check(loop, parse_point("a,b", 2)));

  auto closed = inline_structure("port p : X\nport q : X^\ncell a : ax(p, q)\ncell c : cut(p, q)\nconclusions:\n");
  auto r = normal_run(closed, std::vector<Term>{});
  CHECK(r.accepted);
  CHECK(r.trace.empty());
}

TEST_CASE("a token may mention the same variable twice") {
  auto ps = inline_structure(R"(
    port p0 : Y
    port p1 : Y^
    port p2 : Y * Y^
    port p3 : bot
    port p4 : X
    port p5 : X^
    port p6 : Y * Y^ | X^
    port p7 : (Y * Y^ | X^) * bot
    cell ax0 : ax(p0, p1)
    cell tensor1 : tensor(p0, p1 ; p2)
    cell bot2 : bot(p3)
    cell ax3 : ax(p4, p5)
    cell par4 : par(p2, p5 ; p6)
    cell tensor5 : tensor(p6, p3 ; p7)
    conclusions: p4, p7
  )");
  CHECK(run_trace(ps, "a, (((a,a),a),())") ==
        "DISP ax3 witness=a\n"
        "DISP par4 witness=(?_g0,?_g1)\n"
        "UNIF p5 {?_g1=a}\n"
        "DISP tensor1 witness=(?_g2,?_g3)\n"
        "UNIF p2 {?_g0=(?_g2,?_g3)}\n"
        "DISP ax0 witness=?_g2\n"
        "UNIF p1 {?_g3=?_g2}\n"
        "DISP tensor5 witness=(?_g4,?_g5)\n"
        "UNIF p7 {?_g4=((a,a),a), ?_g5=()}\n"
        "UNIF p6 {?_g2=a}\n"
        "DISP bot2 witness=()\n"
        "ACCEPT\n");
  CHECK_FALSE(check(ps, parse_point("a, (((a,b),a),())", 2)));
  run_and_audit(ps, parse_point("a, (((b,b),a),())", 2));
}

TEST_CASE("run options") {
  auto ps = load("fig6.mllps");
  auto x = parse_point("a,(a,b),b", 3);
  RunOptions tight;
  tight.max_displacements = 1;
  auto r = normal_run(ps, x, tight);
  CHECK_FALSE(r.accepted);
  CHECK(r.reason == "bound exceeded");

  RunOptions named;
  named.fresh_prefix = "?v";
  CHECK(format_trace(ps, normal_run(ps, x, named)).find("witness=(?v0,?v1)") != std::string::npos);
}

TEST_CASE("replay rejects a tampered trace") {
  auto ps = load("fig6.mllps");
  auto x = parse_point("a,(a,b),b", 3);
  auto r = normal_run(ps, x);
  auto trace = r.trace;
  for (auto& e : trace)
    if (auto* u = std::get_if<UnifEvent>(&e)) u->subst.insert_or_assign("_g1", t("a"));
  CHECK_THROWS_AS(replay(ps, initial_config(ps, x), trace), std::runtime_error);

  auto skipped = r.trace;
  skipped.erase(skipped.begin());
  auto states = replay(ps, initial_config(ps, x), skipped);
  CHECK_FALSE(states.back().is_zero());
}

TEST_CASE("the bundled examples satisfy every trace invariant") {
  const std::vector<std::string> atoms = {"a", "b", "c"};
  for (auto name : {"fig3.mllps", "fig5.mllps", "fig6.mllps", "axiom.mllps", "isolated_loop.mllps"}) {
    CAPTURE(name);
    auto ps = load(name);
    for (auto& x : testing::conclusion_points(ps, atoms)) {
      auto r = run_and_audit(ps, x);
      CHECK(r.accepted == rel::oracle_check(ps, x));
    }
  }
}

TEST_CASE("random structures: machine agrees with the oracle and keeps its invariants") {
  testing::Rng rng(1234);
  const std::vector<std::pair<std::string, std::string>> rename = {{"a", "b"}, {"b", "e"}};
  int structures = 0, accepted = 0, rejected = 0;
  while (structures < 150) {
    IndexedStructure ps(testing::random_structure(rng, 8));
    if (testing::count_conclusion_points(ps, 2) > 128) continue;
    ++structures;
    for (auto& x : testing::conclusion_points(ps, {"a", "b"})) {
      auto r = run_and_audit(ps, x);
      bool expected = rel::oracle_check(ps, x);
      CHECK_MESSAGE(r.accepted == expected, mll::to_string(ps.source()), format_trace(ps, r));
      (r.accepted ? accepted : rejected)++;
      std::vector<Term> y;
      for (auto& xi : x) y.push_back(testing::rename_atoms(xi, rename));
      CHECK(check(ps, y) == r.accepted);
    }
  }
  CHECK(accepted > 50);
  CHECK(rejected > 50);
}

TEST_CASE("the chain family is accepted within the displacement bound") {
  for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 100u}) {
    CAPTURE(n);
    IndexedStructure ps(testing::chain_structure(n));
    CHECK(ps.cell_count() == 4 * n - 1);
    auto x = testing::chain_point(n);
    auto r = normal_run(ps, x);
    CHECK(r.accepted);
    CHECK(r.displacements <= 2 * ps.cell_count());
    if (n <= 3) CHECK(rel::oracle_check(ps, x));
    if (n >= 2) {
      std::swap(x[x.size() - 1], x[x.size() - 2]);
      CHECK_FALSE(check(ps, x));
    }
  }
}

}
