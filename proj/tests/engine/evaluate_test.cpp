#include <doctest.h>

#include <chrono>
#include <cmath>

#include "curelite/common/error.hpp"
#include "curelite/engine/script.hpp"
#include "support/yeast.hpp"
#include "support/files.hpp"

using namespace curelite;
using namespace curelite::engine;
using curelite::testing::yeast;
using curelite::testing::run_query;
using curelite::testing::source;
using eist::ReliabilityMode;

namespace {

const ResultRow* find_row(const ResultSet& rs, std::vector<std::string> values) {
  eist::Row want(values.begin(), values.end());
  for (const auto& r : rs.rows) {
    if (r.values == want) return &r;
  }
  return nullptr;
}

// R(a, b) with <A,B> by Fred and <A,C> by Karen; projecting `a` gives {{Fred},{Karen}}.
std::unique_ptr<Database> fred_and_karen() {
  auto db = std::make_unique<Database>();
  auto fred = db->register_source({"Fred"}, eist::SourceKind::Curator, 0.8);
  auto karen = db->register_source({"Karen"}, eist::SourceKind::Curator, 0.85);
  run_script(*db, "CREATE TABLE R (a STRING, b STRING, PRIMARY KEY (a, b));");
  db->insert_predict("R", {std::string("A"), std::string("B")}, {fred});
  db->insert_predict("R", {std::string("A"), std::string("C")}, {karen});
  return db;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("facts evaluate to certainty and independent predictions combine") {
  auto db = yeast();
  auto rs = run_query(*db, "SELECT pName, interactor FROM Interaction WHERE type = \"activation\"");
  REQUIRE(rs.rows.size() == 3);
  const auto* ste7 = find_row(rs, {"STE11", "STE7"});
  REQUIRE(ste7);
  CHECK(ste7->lineage.is_fact());
  CHECK(ste7->p_reliability == 1.0);
  const auto* sho1 = find_row(rs, {"STE11", "SHO1"});
  REQUIRE(sho1);
  CHECK(sho1->provenance == "(Karen)|(Maria)");
  // 1 - (1-0.85)(1-0.7)
  CHECK(std::abs(sho1->p_reliability - 0.955) < 1e-12);
  CHECK(sho1->f_reliability == 0.85);
}

TEST_CASE("q1 folds the matching prediction into the fact row") {
  auto db = yeast();
  auto rs = run_query(*db, testing::corpus("q1"));
  REQUIRE(rs.rows.size() == 1);
  CHECK(rs.columns == std::vector<std::string>{"pName", "organism"});
  CHECK(rs.rows[0].values == eist::Row{std::string("STE11"), std::string("S. cerevisiae")});
  CHECK(rs.rows[0].lineage.is_fact());
  CHECK(rs.rows[0].provenance == "(T)");
}

TEST_CASE("a join with a single-source prediction carries that source") {
  auto db = yeast();
  auto rs = run_query(*db,
                      "SELECT i.pName, i.interactor, n.date FROM Interaction AS i, Names AS n "
                      "WHERE i.pName = n.name AND i.organism = n.organism AND i.type = \"Phosphorylation\"");
  REQUIRE(rs.rows.size() == 3);
  for (const auto& r : rs.rows) {
    if (r.values[0] == eist::Value(std::string("BCK1"))) {
      CHECK(r.provenance == "(Fred)");
      CHECK(std::abs(r.p_reliability - 0.8) < 1e-12);
      CHECK(r.values[2] == eist::Value(*eist::Date::parse("2016-05-17")));
    }
    if (r.values[1] == eist::Value(std::string("STE7"))) CHECK(r.p_reliability == 1.0);
  }
}

TEST_CASE("one source, then two independent sources") {
  const auto start = std::chrono::steady_clock::now();
  auto db = fred_and_karen();
  auto single = run_query(*db, "SELECT a, b FROM R WHERE b = \"B\"");
  REQUIRE(single.rows.size() == 1);
  CHECK(std::abs(single.rows[0].p_reliability - 0.8) < 1e-12);

  auto both = run_query(*db, "SELECT a FROM R");
  REQUIRE(both.rows.size() == 1);
  CHECK(both.rows[0].provenance == "(Fred)|(Karen)");
  CHECK(std::abs(both.rows[0].p_reliability - 0.97) < 1e-12);
  CHECK(both.rows[0].f_reliability == 0.85);
  auto fuzzy = run_query(*db, "SELECT a FROM R", ReliabilityMode::Fuzzy);
  CHECK(fuzzy.mode == ReliabilityMode::Fuzzy);
  CHECK(fuzzy.rows[0].f_reliability == 0.85);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}

TEST_CASE("whatif applies temporary overrides only") {
  auto db = fred_and_karen();
  const auto snap = db->snapshot();
  const auto fred = source(*snap, "Fred");
  auto q = compile_select("SELECT a FROM R", snap->catalog);
  auto p = plan(q, *snap);

  auto base = evaluate(p, snap, ReliabilityMode::Probabilistic);
  CHECK(whatif(p, {}, snap, ReliabilityMode::Probabilistic) == base);
  // 1 - 0.5 * 0.15
  auto lowered = whatif(p, {{fred, 0.5}}, snap, ReliabilityMode::Probabilistic);
  CHECK(std::abs(lowered.rows[0].p_reliability - 0.925) < 1e-12);
  auto certain = whatif(p, {{fred, 1.0}}, snap, ReliabilityMode::Probabilistic);
  CHECK(certain.rows[0].p_reliability == 1.0);

  CHECK(db->snapshot()->sources.effective(fred) == 0.8);
  CHECK(evaluate(p, db->snapshot(), ReliabilityMode::Probabilistic) == base);
}

TEST_CASE("override errors") {
  auto db = fred_and_karen();
  const auto snap = db->snapshot();
  auto p = plan(compile_select("SELECT a FROM R", snap->catalog), *snap);
  const auto fred = source(*snap, "Fred");
  CHECK(code_of([&] { whatif(p, {{eist::SourceId::truth(), 0.5}}, snap, ReliabilityMode::Probabilistic); }) ==
        ErrorCode::UnknownOverrideSource);
  CHECK(code_of([&] { whatif(p, {{eist::SourceId(9), 0.5}}, snap, ReliabilityMode::Probabilistic); }) ==
        ErrorCode::UnknownOverrideSource);
  CHECK(code_of([&] { whatif(p, {{fred, 0.0}}, snap, ReliabilityMode::Probabilistic); }) ==
        ErrorCode::InvalidReliability);
  CHECK(code_of([&] { whatif(p, {{fred, 1.5}}, snap, ReliabilityMode::Probabilistic); }) ==
        ErrorCode::InvalidReliability);
}

TEST_CASE("persistent overrides feed evaluation until cleared") {
  auto db = fred_and_karen();
  const auto fred = source(*db->snapshot(), "Fred");
  db->set_override(fred, 0.5);
  CHECK(std::abs(run_query(*db, "SELECT a FROM R").rows[0].p_reliability - 0.925) < 1e-12);
  db->set_override(fred, std::nullopt);
  CHECK(std::abs(run_query(*db, "SELECT a FROM R").rows[0].p_reliability - 0.97) < 1e-12);
}

TEST_CASE("archived tuples never contribute to answers") {
  auto db = yeast();
  auto snap = db->snapshot();
  CHECK(snap->relation("Interaction").archive().size() == 1);
  auto rs = run_query(*db, "SELECT pName, interactor, type FROM Interaction WHERE organism = \"S. pombe\"");
  REQUIRE(rs.rows.size() == 1);
  CHECK(rs.rows[0].lineage.is_fact());
}

TEST_CASE("migration: a contradicting fact archives Fred's prediction and rescores him") {
  auto db = yeast();
  const auto before = db->snapshot();
  const auto fred = source(*before, "Fred");
  const eist::Row fact{std::string("BCK1"), std::string("MKK1"), std::string("S. cerevisiae"), std::string("Activation")};
  auto w = db->insert_fact("Interaction", fact);

  REQUIRE(w.records.size() == 1);
  CHECK(w.records[0].contributors == std::vector<eist::SourceId>{fred});
  CHECK_FALSE(w.records[0].confirmed);

  const auto after = db->snapshot();
  const auto& old_rel = before->relation("Interaction");
  const auto& rel = after->relation("Interaction");
  CHECK(rel.predict().size() == old_rel.predict().size() - 1);
  CHECK(rel.archive().size() == old_rel.archive().size() + 1);
  std::vector<eist::EistTuple> moved;
  for (const auto& t : rel.archive()) {
    if (std::find(old_rel.archive().begin(), old_rel.archive().end(), t) == old_rel.archive().end()) moved.push_back(t);
  }
  REQUIRE(moved.size() == 1);
  CHECK(moved[0].values[3] == eist::Value(std::string("Phosphorylation")));
  CHECK(moved[0].lineage == eist::mk_base_lineage(std::vector{fred}));

  const auto& profile = after->sources.profile(fred);
  CHECK(profile.confirmed == 0);
  CHECK(profile.resolved == 1);
  CHECK(std::abs(profile.reliability - 1.0 / 3.0) < 1e-12);
  CHECK(after->sources.effective(source(*after, "Russ")) == 0.9);

  auto rs = run_query(*db, "SELECT type FROM Interaction WHERE pName = \"BCK1\"");
  REQUIRE(rs.rows.size() == 1);
  CHECK(rs.rows[0].values[0] == eist::Value(std::string("Activation")));
}

TEST_CASE("snapshots isolate readers from later writes") {
  auto db = yeast();
  auto snap = db->snapshot();
  auto q = compile_select("SELECT pName, interactor FROM Interaction", snap->catalog);
  auto before = evaluate(plan(q, *snap), snap, ReliabilityMode::Probabilistic);
  db->insert_predict("Interaction",
                     {std::string("STE50"), std::string("STE11"), std::string("S. cerevisiae"), std::string("binding")},
                     {source(*snap, "Maria")});
  CHECK(evaluate(plan(q, *snap), snap, ReliabilityMode::Probabilistic) == before);
  auto now = db->snapshot();
  CHECK(now.id() > snap.id());
  CHECK(evaluate(plan(q, *now), now, ReliabilityMode::Probabilistic).rows.size() == before.rows.size() + 1);
  CHECK(db->snapshot(snap.id()).state == snap.state);
}

TEST_CASE("old snapshots are eventually evicted") {
  auto db = fred_and_karen();
  const auto first = db->snapshot().id();
  for (int i = 0; i < 40; ++i) db->register_source({"extra" + std::to_string(i)});
  CHECK(code_of([&] { db->snapshot(first); }) == ErrorCode::SnapshotGone);
  CHECK_NOTHROW(db->snapshot(db->snapshot().id()));
}

TEST_CASE("evaluation is deterministic") {
  auto a = yeast();
  auto b = yeast();
  const std::string q = "SELECT i.pName, e.eName FROM Interaction AS i, Experts AS e WHERE i.organism = e.species";
  auto ra = run_query(*a, q);
  auto rb = run_query(*b, q);
  ra.snapshot_id = rb.snapshot_id = 0;
  CHECK(ra == rb);
  CHECK(format_table(ra) == format_table(rb));
  CHECK(std::is_sorted(ra.rows.begin(), ra.rows.end(),
                       [](const ResultRow& x, const ResultRow& y) { return x.values < y.values; }));
}

TEST_CASE("rows with a CNULL output cell are left out and comparisons with CNULL fail") {
  auto db = yeast();
  auto rs = run_query(*db, "SELECT name, date FROM Names WHERE organism = \"S. cerevisiae\"");
  CHECK(rs.rows.size() == 5);
  CHECK(find_row(rs, {"SHO1"}) == nullptr);
  auto q2 = run_query(*db, testing::corpus("q2"));
  // Dates on or after 2016-01-31: STE50 and BCK1. CNULL dates never match.
  REQUIRE(q2.rows.size() == 2);
  CHECK(q2.rows[0].values[0] == eist::Value(std::string("BCK1")));
  CHECK(q2.rows[1].values[0] == eist::Value(std::string("STE50")));
}

TEST_CASE("group by adds a partition label") {
  auto db = yeast();
  auto rs = run_query(*db, "SELECT pName FROM Interaction GROUP BY organism");
  CHECK(rs.partition_columns == std::vector<std::string>{"organism"});
  REQUIRE(rs.rows.size() == 3);
  // STE11 in both organisms stays two rows.
  CHECK(rs.rows[1].values == rs.rows[2].values);
  CHECK(rs.rows[1].partition != rs.rows[2].partition);
  CHECK(format_table(rs).find("group:organism") != std::string::npos);
}

TEST_CASE("result table format") {
  auto db = fred_and_karen();
  auto text = format_table(run_query(*db, "SELECT a FROM R"));
  CHECK(text ==
        "a  lineage         p_reliability  f_reliability\n"
        "A  (Fred)|(Karen)  0.9700         0.8500\n"
        "(1 row)\n");
}
