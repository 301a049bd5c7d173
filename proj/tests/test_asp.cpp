#include <doctest.h>

#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "lace/asp.hpp"
#include "lace/engine.hpp"
#include "support/fixtures.hpp"

using namespace lace;

namespace {

AspProgram emit(const Workspace& ws) { return emit_program(ws.db, ws.spec, ws.sim); }

std::string err_msg(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "none";
}

bool has(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

// Two tuples per relation, no rules or constraints unless appended.
const char* kTinyBase = R"(
relation R(a: obj, v: val)
relation W(a: obj, b: obj)

t1: R(b1, "u")
t2: R(b2, "v")
t3: W(b1, b2)
)";

Workspace tiny(const std::string& tail) {
  return parse_workspace(std::string(kTinyBase) + tail);
}

}  // namespace

TEST_CASE("constant mangling is prefix plus reversible lowercase encoding") {
  CHECK(mangle(Kind::Tid, "t1") == "t_t1");
  CHECK(mangle(Kind::Obj, "a1") == "o_a1");
  CHECK(mangle(Kind::Obj, "A_b.C") == "o__a__b_x2e_c");
  CHECK(mangle(Kind::Obj, "x y") == "o_x_x20y");
  CHECK(mangle_relation("Author") == "r__author");
  CHECK(mangle_relation("wrote2") == "r_wrote2");
  // Values stay quoted strings; the escape set is double quote, backslash,
  // newline, tab.
  CHECK(mangle(Kind::Val, "say \"hi\"\n\t") == "\"say \\\"hi\\\"\\n\\t\"");
}

TEST_CASE("rendering of terms, atoms, and the three rule shapes") {
  CHECK(AspTerm::integer(7).render() == "7");
  CHECK(AspTerm::str("a,b").render() == "\"a,b\"");
  CHECK(AspAtom{"flag", {}}.render() == "flag");

  AspAtom head{"eqo", {AspTerm::var("X"), AspTerm::sym("o_a1")}};
  AspRule fact{head, {}};
  CHECK(fact.render() == "eqo(X,o_a1).");

  AspRule rule{head, {AspLiteral{false, AspAtom{"obj", {AspTerm::var("X")}}},
                      AspLiteral{true, AspAtom{"neqo", {AspTerm::var("X"), AspTerm::var("X")}}}}};
  CHECK(rule.render() == "eqo(X,o_a1) :- obj(X), not neqo(X,X).");

  AspRule constraint{std::nullopt, {AspLiteral{false, AspAtom{"obj", {AspTerm::var("X")}}}}};
  CHECK(constraint.render() == ":- obj(X).");
}

TEST_CASE("bibliography program matches the stored rendering byte for byte") {
  Workspace ws = testsupport::fig1();
  std::string rendered = emit(ws).render();
  CHECK(rendered == testsupport::read_file(testsupport::data_path("fig1.asp")));
  // Emission is deterministic.
  CHECK(emit(ws).render() == rendered);
}

TEST_CASE("bibliography program carries the expected rewritten rules") {
  Workspace ws = testsupport::fig1();
  std::string text = emit(ws).render();

  // Hard object rule: the name and affiliation joins go through stored-value
  // witnesses, so two unmerged authors with equal strings already match.
  CHECK(has(text,
            "eqo(V0,V1) :- r__author(V2,V0,V3,V4), r__author(V5,V1,V6,V7), "
            "val(V2,2,V8), val(V5,2,V8), val(V2,3,V9), val(V5,3,V9)."));
  // Hard value rule: head names tuple ids and positions, the object join goes
  // through an eqo witness, similarity reads merged-cell values.
  CHECK(has(text,
            "eqv(V0,2,V1,2) :- r__author(V0,V2,V3,V4), r__author(V1,V5,V6,V7), "
            "eqo(V2,V8), eqo(V5,V8), val(V0,2,V9), val(V1,2,V10), sim(V9,V10)."));
  // Soft object rule feeds the choice pair through activeo.
  CHECK(has(text,
            "activeo(V0,V1) :- r__author(V2,V0,V3,V4), r__author(V5,V1,V6,V7), "
            "r__wrote(V8,V9,V10), r__wrote(V11,V12,V13), eqo(V0,V14), eqo(V9,V14), "
            "eqo(V1,V15), eqo(V12,V15), eqo(V10,V16), eqo(V13,V16), val(V2,2,V17), "
            "val(V5,2,V18), sim(V17,V18)."));
  // Value inequality in the first constraint becomes a negated shared-value
  // test over the two tuples' name cells.
  CHECK(has(text, "sharev0(V0,V1) :- val(V0,2,W), val(V1,2,W)."));
  CHECK(has(text,
            ":- r__author(V0,V1,V2,V3), r__author(V4,V5,V6,V7), eqo(V1,V8), "
            "eqo(V5,V8), not sharev0(V0,V4)."));
  CHECK(has(text,
            ":- r__paper(V0,V1,V2,V3,V4), r__wrote(V5,V6,V7), eqo(V1,V8), "
            "eqo(V7,V8), eqo(V4,V9), eqo(V6,V9)."));

  // Only the object choice pair is present: the spec has no soft value rule.
  CHECK(has(text, "eqo(V0,V1) :- activeo(V0,V1), not neqo(V0,V1)."));
  CHECK(has(text, "neqo(V0,V1) :- activeo(V0,V1), not eqo(V0,V1)."));
  CHECK_FALSE(has(text, "activev"));
  CHECK_FALSE(has(text, "neqv"));
}

TEST_CASE("soft value rules produce the cell choice pair and an activev head") {
  Workspace ws = tiny(R"(
sim "u" ~ "v"
soft val: R(x, a, n), R(y, a, m), n ~ m ~> EqV(x.2, y.2)
)");
  std::string text = emit(ws).render();
  CHECK(has(text, "% choices"));
  CHECK(has(text, "eqv(V0,V1,V2,V3) :- activev(V0,V1,V2,V3), not neqv(V0,V1,V2,V3)."));
  CHECK(has(text, "neqv(V0,V1,V2,V3) :- activev(V0,V1,V2,V3), not eqv(V0,V1,V2,V3)."));
  CHECK(has(text,
            "activev(V0,2,V1,2) :- r__r(V0,V2,V3), r__r(V1,V4,V5), eqo(V2,V6), "
            "eqo(V4,V6), val(V0,2,V7), val(V1,2,V8), sim(V7,V8)."));
  // No soft object rule, so no object choice pair.
  CHECK_FALSE(has(text, "activeo"));
  validate_program(emit(ws), ws.db);
}

TEST_CASE("constants in bodies become class-membership anchors") {
  Workspace ws = tiny(R"(
dc: R(t, a, "u"), W(t2, a, a) -> false
)");
  std::string text = emit(ws).render();
  CHECK(has(text,
            ":- r__r(V0,V1,V2), r__w(V3,V4,V5), eqo(V1,V6), eqo(V4,V6), eqo(V5,V6), "
            "val(V0,2,\"u\")."));
  validate_program(emit(ws), ws.db);
}

TEST_CASE("object inequality constrains the two class representatives") {
  Workspace ws = tiny(R"(
dc: R(t, x, n), R(t2, y, n), x != y -> false
)");
  std::string text = emit(ws).render();
  CHECK(has(text,
            ":- r__r(V0,V1,V2), r__r(V3,V4,V5), val(V0,2,V6), val(V3,2,V6), "
            "not eqo(V1,V4)."));
  validate_program(emit(ws), ws.db);
}

TEST_CASE("value inequality against a literal pins the shared-value witness") {
  Workspace ws = tiny(R"(
dc: R(t, x, n), n != "w" -> false
)");
  std::string text = emit(ws).render();
  CHECK(has(text, "sharev0(V0) :- val(V0,2,\"w\")."));
  CHECK(has(text, ":- r__r(V0,V1,V2), not sharev0(V0)."));
  validate_program(emit(ws), ws.db);
}

TEST_CASE("impossible and vacuous inequalities fold away") {
  // x != x can never hold, so the whole constraint disappears; an
  // object-versus-value comparison always holds, so only the atom drops.
  Workspace ws = tiny(R"(
dc: R(t, x, n), x != x -> false
dc: R(t, x, n), x != n -> false
)");
  std::string text = emit(ws).render();
  size_t mark = text.find("% constraints");
  REQUIRE(mark != std::string::npos);
  std::string section = text.substr(mark);
  CHECK(has(section, ":- r__r(V0,V1,V2)."));
  // Exactly one constraint line: the x != x body was dropped whole.
  CHECK(section.find(":-") == section.rfind(":-"));
  CHECK_FALSE(has(section, "sharev"));
  validate_program(emit(ws), ws.db);
}

TEST_CASE("structural validator accepts every emitted program shape") {
  Workspace ws = testsupport::fig1();
  validate_program(emit(ws), ws.db);
}

TEST_CASE("structural validator rejects malformed programs") {
  Workspace ws = testsupport::fig1();
  auto program_with = [](AspRule r) {
    AspProgram p;
    p.sections.emplace_back("extra", std::vector<AspRule>{std::move(r)});
    return p;
  };
  auto v = [](const char* n) { return AspTerm::var(n); };

  AspRule unknown{AspAtom{"foo", {v("V0")}},
                  {AspLiteral{false, AspAtom{"obj", {v("V0")}}}}};
  CHECK(has(err_msg([&] { validate_program(program_with(unknown), ws.db); }),
            "unknown predicate"));

  AspRule arity{AspAtom{"eqo", {v("V0")}}, {AspLiteral{false, AspAtom{"obj", {v("V0")}}}}};
  CHECK(has(err_msg([&] { validate_program(program_with(arity), ws.db); }),
            "arity mismatch"));

  // A variable seen only under negation is unsafe.
  AspRule unsafe{AspAtom{"eqo", {v("V0"), v("V1")}},
                 {AspLiteral{false, AspAtom{"obj", {v("V0")}}},
                  AspLiteral{true, AspAtom{"neqo", {v("V0"), v("V1")}}}}};
  CHECK(has(err_msg([&] { validate_program(program_with(unsafe), ws.db); }),
            "unsafe variable"));

  // Similarity atoms never ground a variable on their own.
  AspRule sim_only{AspAtom{"eqo", {v("V0"), v("V1")}},
                   {AspLiteral{false, AspAtom{"obj", {v("V0")}}},
                    AspLiteral{false, AspAtom{"sim", {v("V1"), v("V1")}}}}};
  CHECK(has(err_msg([&] { validate_program(program_with(sim_only), ws.db); }),
            "unsafe variable"));

  // sharev<k> helpers take any arity, but the digits are required.
  AspRule helper{AspAtom{"sharev7", {v("V0"), v("V1")}},
                 {AspLiteral{false, AspAtom{"val", {v("V0"), AspTerm::integer(2), v("W")}}},
                  AspLiteral{false, AspAtom{"val", {v("V1"), AspTerm::integer(2), v("W")}}}}};
  CHECK_NOTHROW(validate_program(program_with(helper), ws.db));
  AspRule bare{AspAtom{"sharev", {v("V0")}},
               {AspLiteral{false, AspAtom{"val", {v("V0"), AspTerm::integer(2), v("W")}}}}};
  CHECK(has(err_msg([&] { validate_program(program_with(bare), ws.db); }),
            "unknown predicate"));
}

TEST_CASE("model text decodes to the merge partitions it lists") {
  Workspace ws = testsupport::fig1();
  auto [e, v] = decode_model(
      "eqo(o_a1,o_a2) eqo(o_a2,o_a5) eqv(t_t1,2,t_t2,2) eqv(t_t2,2,t_t5,2) "
      "tid(t_t1) activeo(o_a6,o_a7) sim(\"a b\",\"a b\")",
      ws.db);
  CHECK(e.key() == "{a1 a2 a5}");
  CHECK(v.key() == "{t1.2 t2.2 t5.2}");

  auto [e2, v2] = decode_model("", ws.db);
  CHECK(e2.is_trivial());
  CHECK(v2.is_trivial());
}

TEST_CASE("model text naming unknown elements or non-value cells is rejected") {
  Workspace ws = testsupport::fig1();
  CHECK(has(err_msg([&] { decode_model("eqo(o_zz,o_a1)", ws.db); }), "unknown object"));
  CHECK(has(err_msg([&] { decode_model("eqv(t_zz,2,t_t1,2)", ws.db); }), "unknown tuple id"));
  // t14 is an authorship tuple: both positions hold objects, not values.
  CHECK(has(err_msg([&] { decode_model("eqv(t_t14,1,t_t15,1)", ws.db); }), "not a value cell"));
  CHECK(has(err_msg([&] { decode_model("eqo(o_a1)", ws.db); }), "malformed"));
}

TEST_CASE("external solver hook is off without the environment variable") {
  Workspace ws = testsupport::fig1();
  unsetenv("LACE_ASP_SOLVER");
  CHECK_FALSE(solve_with_env_solver(emit(ws), ws.db).has_value());
}

TEST_CASE("external solver hook decodes one partition pair per answer block") {
  Workspace ws = testsupport::fig1();
  // Stand-in solver; the program path lands in $0 and is ignored.
  setenv("LACE_ASP_SOLVER",
         "sh -c 'printf \"Answer: 1\\neqo(o_a1,o_a2)\\nAnswer: 2\\n"
         "eqv(t_t1,2,t_t2,2)\\nSATISFIABLE\\n\"'",
         1);
  auto models = solve_with_env_solver(emit(ws), ws.db);
  REQUIRE(models.has_value());
  REQUIRE(models->size() == 2);
  CHECK((*models)[0].first.key() == "{a1 a2}");
  CHECK((*models)[0].second.is_trivial());
  CHECK((*models)[1].first.is_trivial());
  CHECK((*models)[1].second.key() == "{t1.2 t2.2}");

  setenv("LACE_ASP_SOLVER", "sh -c 'echo UNSATISFIABLE'", 1);
  auto none = solve_with_env_solver(emit(ws), ws.db);
  REQUIRE(none.has_value());
  CHECK(none->empty());
  unsetenv("LACE_ASP_SOLVER");
}
