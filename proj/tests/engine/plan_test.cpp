#include <doctest.h>

#include "curelite/common/error.hpp"
#include "curelite/engine/script.hpp"
#include "support/yeast.hpp"
#include "support/files.hpp"

using namespace curelite;
using namespace curelite::engine;
using curelite::testing::yeast;

namespace {

Plan plan_of(const Database& db, const std::string& text) {
  auto snap = db.snapshot();
  return plan(compile_select(text, snap->catalog), *snap);
}

}  // namespace

TEST_CASE("q1 is a pure eIST query") {
  auto db = yeast();
  auto p = plan_of(*db, testing::corpus("q1"));
  CHECK(p.kind == cureql::QueryKind::PureEist);
  CHECK_FALSE(p.collection);
  CHECK(p.evaluation.shape() == "Project(Select(Scan Interaction))");
}

TEST_CASE("q2 touches CNULL dates and asks the crowd for them") {
  auto db = yeast();
  auto p = plan_of(*db, testing::corpus("q2"));
  CHECK(p.kind == cureql::QueryKind::CureQL);
  REQUIRE(p.collection);
  CHECK_FALSE(p.collection->extractor);
  CHECK_FALSE(p.collection->levels);
  REQUIRE(p.collection->cell_fills.size() == 2);
  for (const auto& fill : p.collection->cell_fills) {
    CHECK(fill.relation == "Names");
    CHECK(fill.column == 2);
  }
  CHECK(p.collection->cell_fills[0].row[0] == eist::Value(std::string("PBS2")));
  CHECK(p.collection->cell_fills[1].row[0] == eist::Value(std::string("SHO1")));
}

TEST_CASE("q3 plans extraction, two curator levels and evaluation") {
  auto db = testing::yeast_with_tools();
  auto p = plan_of(*db, testing::corpus("q3"));
  CHECK(p.kind == cureql::QueryKind::CureQL);
  REQUIRE(p.collection);
  const auto& c = *p.collection;
  REQUIRE(c.extractor);
  CHECK(c.extractor->name == "UniHi");
  CHECK(c.input == "I_papers");
  CHECK(c.target_relation == "Interaction");
  CHECK_FALSE(c.solicit_rows);
  REQUIRE(c.levels);
  CHECK(c.levels->levels.size() == 2);
  CHECK_FALSE(c.per_group);
  CHECK(p.evaluation.shape() == "Project(Select(Scan Interaction))");

  auto r1 = level_rows(*c.levels->levels[0].query, *db->snapshot());
  auto mit = level_rows(*c.levels->levels[1].query, *db->snapshot());
  CHECK(r1 == std::vector<eist::Row>{{std::string("Fred")}, {std::string("Maria")}});
  CHECK(mit == std::vector<eist::Row>{{std::string("Karen")}, {std::string("Russ")}});
}

TEST_CASE("q4 partitions by type and resolves its correlated level per row") {
  auto db = testing::yeast_with_tools();
  auto p = plan_of(*db, testing::corpus("q4"));
  REQUIRE(p.collection);
  const auto& c = *p.collection;
  CHECK(c.per_group);
  REQUIRE(c.group_by.size() == 1);
  CHECK(c.group_by[0].name == "type");
  CHECK(p.evaluation.shape() == "Project(GroupPartition(Scan Interaction))");
  REQUIRE(c.levels);
  REQUIRE(c.levels->levels.size() == 2);
  CHECK(c.levels->levels[0].correlated);

  const auto snap = db->snapshot();
  const eist::Row pombe_row{std::string("STE11"), std::string("STE7"), std::string("S. pombe"), std::string("x")};
  auto experts = level_rows(*c.levels->levels[0].query, *snap, {{c.target_binding, pombe_row}});
  CHECK(experts == std::vector<eist::Row>{{std::string("Karen"), std::string("MIT")},
                                         {std::string("Maria"), std::string("Yale")}});
  CHECK_THROWS_AS(level_rows(*c.levels->levels[0].query, *snap), Error);

  auto limits = bind_limits(c.limits, {{"t", 60}, {"k", 3}});
  CHECK(limits.time == 60);
  CHECK(limits.rows == 3);
  CHECK_THROWS_AS(bind_limits(c.limits, {{"t", 60}}), Error);
  CHECK_THROWS_AS(bind_limits(c.limits, {{"t", 0}, {"k", 3}}), Error);
  CHECK(bind_limits(std::nullopt, {}).indefinite());
}

TEST_CASE("q5 and the missing-extractor failure") {
  auto db = testing::yeast_with_tools();
  auto p = plan_of(*db, testing::corpus("q5"));
  REQUIRE(p.collection);
  CHECK(p.collection->target_relation == "Names");
  REQUIRE(p.collection->levels);
  CHECK(p.collection->levels->levels[0].name == "r2");

  // Validation passes against a catalog that still lists the tool, planning
  // against a database without it fails.
  auto bare = yeast();
  auto q = compile_select(testing::corpus("q3"), testing::yeast_with_tools()->snapshot()->catalog);
  try {
    plan(q, *bare->snapshot());
    FAIL("expected ExtractorMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExtractorMissing);
  }
}

TEST_CASE("join planning") {
  auto db = yeast();
  auto stated = plan_of(*db, "SELECT i.pName FROM Interaction AS i, Names AS n WHERE i.pName = n.name AND n.date > \"2015-01-01\"");
  CHECK(stated.evaluation.shape() == "Project(Select(Join(Scan Interaction, Scan Names)))");
  const auto& join = stated.evaluation.children[0].children[0];
  CHECK(join.predicates.size() == 1);

  // No stated condition: Interaction and Experts share no names, a cross product.
  auto cross = plan_of(*db, "SELECT i.pName, e.eName FROM Interaction AS i, Experts AS e");
  CHECK(cross.evaluation.children[0].predicates.empty());
  // Names and Interaction share `organism`.
  auto natural = plan_of(*db, "SELECT n.name FROM Interaction AS i, Names AS n");
  REQUIRE(natural.evaluation.children[0].predicates.size() == 1);
  CHECK(std::get<cureql::BoundColumn>(natural.evaluation.children[0].predicates[0].lhs).name == "organism");
}

TEST_CASE("script statements: foreign-key warnings and SELECT rejection") {
  auto db = yeast();
  auto r = run_script(*db, "INSERT INTO Interaction FACTS VALUES (\"FUS3\", \"STE7\", \"S. cerevisiae\", \"binding\");");
  CHECK(r.statements == 1);
  REQUIRE(r.write_warnings.size() == 1);
  CHECK(r.write_warnings[0].find("FUS3") != std::string::npos);
  CHECK_THROWS_AS(run_script(*db, "SELECT name FROM Names;"), cureql::DiagnosticError);
  CHECK_THROWS_AS(run_script(*db, "INSERT INTO Interaction PREDICT VALUES (\"A\", \"B\", \"C\", \"D\") SOURCE (\"Nobody\");"),
                  Error);
}
