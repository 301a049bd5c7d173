#include <doctest.h>

#include <algorithm>

#include "lace/model.hpp"
#include "support/fixtures.hpp"

using namespace lace;
using testsupport::fig1;

namespace {

Schema small_schema() {
  Schema s;
  s.add({"R", {PosKind::Obj, PosKind::Val}, {}});
  return s;
}

}  // namespace

TEST_CASE("constants order by kind then lexeme") {
  CHECK(obj_const("a") < obj_const("b"));
  CHECK(obj_const("z") < val_const("a"));
  CHECK(val_const("z") < tid_const("a"));
  CHECK(obj_const("a") == obj_const("a"));
  CHECK(obj_const("a") != val_const("a"));
}

TEST_CASE("schema rejects duplicates and empty relations") {
  Schema s = small_schema();
  std::string code;
  try {
    s.add({"R", {PosKind::Obj}, {}});
  } catch (const Error& e) {
    code = e.code;
  }
  CHECK(code == "E_DUP_RELATION");
  try {
    s.add({"Empty", {}, {}});
  } catch (const Error& e) {
    code = e.code;
  }
  CHECK(code == "E_ARITY");
  CHECK(s.find("R") != nullptr);
  CHECK(s.find("S") == nullptr);
}

TEST_CASE("database add validates facts") {
  Database db;
  db.schema = small_schema();
  db.add({"t1", "R", {obj_const("a"), val_const("x")}});

  auto code_of = [&](Fact f) {
    try {
      db.add(std::move(f));
    } catch (const Error& e) {
      return e.code;
    }
    return std::string("none");
  };
  CHECK(code_of({"t2", "S", {obj_const("a")}}) == "E_UNKNOWN_RELATION");
  CHECK(code_of({"t2", "R", {obj_const("a")}}) == "E_ARITY");
  CHECK(code_of({"t2", "R", {val_const("a"), val_const("x")}}) == "E_TYPE");
  CHECK(code_of({"t1", "R", {obj_const("b"), val_const("y")}}) == "E_TID_REUSE");
  CHECK(db.facts.size() == 1);
  CHECK(db.by_tid("t1") != nullptr);
  CHECK(db.by_tid("t9") == nullptr);
}

TEST_CASE("domain views of the bibliography example") {
  Workspace ws = fig1();
  CHECK(ws.db.facts.size() == 21);
  CHECK(obj_of(ws.db).size() == 13);   // eight authors, five papers
  CHECK(cells_of(ws.db).size() == 26); // two value slots per Author and Paper fact
  CHECK(vals_of(ws.db).size() == 21);
  CHECK(dom_of(ws.db).size() == 13 + 21 + 21);

  auto cells = cells_of(ws.db);
  CHECK(std::is_sorted(cells.begin(), cells.end()));
  CHECK(std::count(cells.begin(), cells.end(), Cell{"t1", 2}) == 1);
  CHECK(std::count(cells.begin(), cells.end(), Cell{"t14", 1}) == 0);  // object slot
  CHECK(to_string(Cell{"t1", 2}) == "t1.2");
}

TEST_CASE("partition unite, classes, and canonical key") {
  Partition<Constant> p({obj_const("a"), obj_const("b"), obj_const("c"), obj_const("d")});
  CHECK(p.is_trivial());
  CHECK(p.class_count() == 4);

  CHECK(p.unite(obj_const("c"), obj_const("a")));
  CHECK_FALSE(p.unite(obj_const("a"), obj_const("c")));
  CHECK(p.same(obj_const("a"), obj_const("c")));
  CHECK_FALSE(p.same(obj_const("a"), obj_const("b")));
  CHECK_FALSE(p.is_trivial());
  CHECK(p.class_count() == 3);

  auto cls = p.classes(true);
  REQUIRE(cls.size() == 3);
  CHECK(cls[0] == std::vector<Constant>{obj_const("a"), obj_const("c")});
  CHECK(cls[1] == std::vector<Constant>{obj_const("b")});

  auto nontrivial = p.classes(false);
  REQUIRE(nontrivial.size() == 1);

  CHECK(p.unite(obj_const("b"), obj_const("d")));
  CHECK(p.key() == "{a c}{b d}");

  auto pr = p.pairs();
  REQUIRE(pr.size() == 2);
  CHECK(pr[0] == std::pair{obj_const("a"), obj_const("c")});
  CHECK(pr[1] == std::pair{obj_const("b"), obj_const("d")});
}

TEST_CASE("partition refinement ordering") {
  std::vector<Constant> u{obj_const("a"), obj_const("b"), obj_const("c")};
  Partition<Constant> fine(u), coarse(u);
  coarse.unite(obj_const("a"), obj_const("b"));
  CHECK(fine.refines(coarse));
  CHECK_FALSE(coarse.refines(fine));
  CHECK(coarse.refines(coarse));

  fine.unite(obj_const("a"), obj_const("c"));
  CHECK_FALSE(fine.refines(coarse));
  CHECK_FALSE(coarse.refines(fine));

  Partition<Constant> again(u);
  again.unite(obj_const("b"), obj_const("a"));
  CHECK(again == coarse);
  CHECK(again.key() == coarse.key());
}

TEST_CASE("partition rejects foreign elements") {
  Partition<Constant> p({obj_const("a")});
  CHECK(p.contains(obj_const("a")));
  CHECK_FALSE(p.contains(obj_const("z")));
  CHECK_THROWS_AS(p.same(obj_const("a"), obj_const("z")), DomainError);
}

TEST_CASE("equivalence closure of a pair list") {
  std::vector<Constant> u{obj_const("a"), obj_const("b"), obj_const("c"), obj_const("d")};
  auto p = eqrel_close<Constant>({{obj_const("a"), obj_const("b")},
                                  {obj_const("b"), obj_const("c")}},
                                 u);
  CHECK(p.same(obj_const("a"), obj_const("c")));
  CHECK_FALSE(p.same(obj_const("a"), obj_const("d")));
  CHECK(p.class_count() == 2);
}

TEST_CASE("edit similarity is normalized") {
  CHECK(normalized_edit_similarity("", "") == doctest::Approx(1.0));
  CHECK(normalized_edit_similarity("a", "") == doctest::Approx(0.0));
  CHECK(normalized_edit_similarity("abc", "abc") == doctest::Approx(1.0));
  CHECK(normalized_edit_similarity("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
  CHECK(normalized_edit_similarity("J. Smith", "Joe Smith") == doctest::Approx(1.0 - 2.0 / 9.0));
}

TEST_CASE("similarity oracle: table, threshold, reflexivity") {
  SimilarityOracle sim;
  sim.add_pair("Min Lee", "M. Lee");
  CHECK(sim.sim("Min Lee", "M. Lee"));
  CHECK(sim.sim("M. Lee", "Min Lee"));  // symmetric
  CHECK(sim.sim("anything", "anything"));  // reflexive without a table entry
  CHECK_FALSE(sim.sim("Min Lee", "Myriam Lee"));

  sim.set_threshold(0.7);
  CHECK(sim.sim("J. Smith", "Joe Smith"));  // 7/9 above threshold
  sim.set_threshold(0.8);
  CHECK_FALSE(sim.sim("J. Smith", "Joe Smith"));

  CHECK_THROWS_AS(sim.set_threshold(1.5), Error);
  CHECK_THROWS_AS(sim.set_threshold(-0.1), Error);
}

TEST_CASE("widened facts under the identity merge") {
  Workspace ws = fig1();
  auto e = trivial_objects(ws.db);
  auto v = trivial_cells(ws.db);
  auto xdb = induce_extended_db(ws.db, e, v);
  REQUIRE(xdb.facts.size() == 21);
  for (const auto& xf : xdb.facts) {
    const Fact& f = ws.db.facts[xf.fact_index];
    REQUIRE(xf.args.size() == f.args.size() + 1);
    CHECK(xf.args[0] == std::vector<Constant>{tid_const(f.tid)});
    for (size_t i = 0; i < f.args.size(); ++i)
      CHECK(xf.args[i + 1] == std::vector<Constant>{f.args[i]});
  }
  CHECK(xdb.by_relation.at("Author").size() == 8);
  CHECK(xdb.by_relation.at("Paper").size() == 5);
  CHECK(xdb.by_relation.at("Wrote").size() == 8);
}

TEST_CASE("widened facts after merging objects and cells") {
  Workspace ws = fig1();
  auto e = trivial_objects(ws.db);
  auto v = trivial_cells(ws.db);
  e.unite(obj_const("a1"), obj_const("a2"));
  v.unite(Cell{"t1", 2}, Cell{"t2", 2});
  auto xdb = induce_extended_db(ws.db, e, v);

  const ExtendedFact* t1 = nullptr;
  const ExtendedFact* t14 = nullptr;
  for (const auto& xf : xdb.facts) {
    const std::string& tid = ws.db.facts[xf.fact_index].tid;
    if (tid == "t1") t1 = &xf;
    if (tid == "t14") t14 = &xf;
  }
  REQUIRE(t1 != nullptr);
  REQUIRE(t14 != nullptr);

  // Object slot widens to the merge class, the merged name cells share both
  // stored spellings, untouched slots stay singletons.
  CHECK(t1->args[1] == std::vector<Constant>{obj_const("a1"), obj_const("a2")});
  CHECK(t1->args[2] == std::vector<Constant>{val_const("J. Smith"), val_const("Joe Smith")});
  CHECK(t1->args[3] == std::vector<Constant>{val_const("Sapienza")});
  CHECK(t14->args[1] == std::vector<Constant>{obj_const("a1"), obj_const("a2")});
}

TEST_CASE("widening rejects mismatched universes") {
  Workspace ws = fig1();
  Database other;
  other.schema = ws.db.schema;
  other.add({"x1", "Author", {obj_const("b1"), val_const("n"), val_const("i")}});
  auto e = trivial_objects(other);
  auto v = trivial_cells(other);
  CHECK_THROWS_AS(induce_extended_db(ws.db, e, v), DomainError);
}
