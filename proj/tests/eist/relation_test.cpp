#include <doctest.h>

#include <random>

#include "curelite/common/error.hpp"
#include "curelite/eist/relation.hpp"

using namespace curelite;
using namespace curelite::eist;

namespace {

const SourceId kRuss{1}, kFred{2}, kKaren{3}, kMaria{4};

Schema interaction_schema() {
  return Schema({{"pName", BaseType::String, false, false},
                 {"interactor", BaseType::String, false, false},
                 {"organism", BaseType::String, false, false},
                 {"type", BaseType::String, false, false}},
                /*crowd_table=*/true, {"pName", "interactor", "organism"});
}

Row row(std::string a, std::string b, std::string c, std::string d) {
  return Row{std::move(a), std::move(b), std::move(c), std::move(d)};
}

Lineage L(std::vector<Lineage::Conjunct> c) { return Lineage::from_conjuncts(std::move(c)); }

}  // namespace

TEST_CASE("insert_predict adds, merges and keeps rival candidates") {
  EistRelation rel("Interaction", interaction_schema());
  const auto phos = row("BCK1", "MKK1", "S. cerevisiae", "Phosphorylation");

  auto out = rel.insert_predict(phos, std::vector<SourceId>{kFred});
  CHECK(out.effect == PredictEffect::Added);
  REQUIRE(rel.predict().size() == 1);
  CHECK(rel.predict()[0].lineage == L({{kFred}}));

  out = rel.insert_predict(phos, std::vector<SourceId>{kKaren});
  CHECK(out.effect == PredictEffect::Merged);
  REQUIRE(rel.predict().size() == 1);
  CHECK(rel.predict()[0].lineage == L({{kFred}, {kKaren}}));

  // Same source again is idempotent.
  rel.insert_predict(phos, std::vector<SourceId>{kKaren});
  CHECK(rel.predict()[0].lineage == L({{kFred}, {kKaren}}));

  rel.insert_predict(row("BCK1", "MKK1", "S. cerevisiae", "Activation"), std::vector<SourceId>{kMaria});
  CHECK(rel.predict().size() == 2);
  CHECK(rel.schema().key_of(rel.predict()[0].values) == rel.schema().key_of(rel.predict()[1].values));
  rel.check_invariants();
}

TEST_CASE("insert_predict rejects bad input") {
  EistRelation rel("Interaction", interaction_schema());
  CHECK_THROWS_AS(rel.insert_predict(Row{std::string("x")}, std::vector<SourceId>{kFred}), Error);
  try {
    rel.insert_predict(row("a", "b", "c", "d"), std::vector<SourceId>{SourceId::truth()});
    FAIL("expected FactContributor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FactContributor);
  }
  CHECK_THROWS_AS(rel.insert_predict(Row{std::string("a"), std::string("b"), std::string("c"), CNull{}},
                                     std::vector<SourceId>{}),
                  Error);
}

TEST_CASE("insert_fact migrates key-matching predictions to Archive") {
  EistRelation rel("Interaction", interaction_schema());
  const auto phos = row("BCK1", "MKK1", "S. cerevisiae", "Phosphorylation");
  rel.insert_predict(phos, std::vector<SourceId>{kFred});
  rel.insert_predict(row("STE11", "STE7", "S. pombe", "Activation"), std::vector<SourceId>{kRuss});

  const auto records = rel.insert_fact(row("BCK1", "MKK1", "S. cerevisiae", "Activation"));
  REQUIRE(records.size() == 1);
  CHECK_FALSE(records[0].confirmed);
  CHECK(records[0].contributors == std::vector<SourceId>{kFred});
  CHECK(records[0].predicted_values == Row{std::string("Phosphorylation")});
  CHECK(records[0].fact_values == Row{std::string("Activation")});
  REQUIRE(rel.archive().size() == 1);
  CHECK(rel.archive()[0].values == phos);
  CHECK(rel.archive()[0].lineage == L({{kFred}}));
  CHECK(rel.predict().size() == 1);
  CHECK(rel.facts().size() == 1);
  CHECK(rel.facts()[0].lineage.is_fact());

  // No key-matching candidate: no migration.
  CHECK(rel.insert_fact(row("A", "B", "C", "D")).empty());

  // Confirmation branch.
  const auto records2 = rel.insert_fact(row("STE11", "STE7", "S. pombe", "Activation"));
  REQUIRE(records2.size() == 1);
  CHECK(records2[0].confirmed);
  rel.check_invariants();
}

TEST_CASE("insert_fact errors and the fact-already-known paths") {
  EistRelation rel("Interaction", interaction_schema());
  rel.insert_fact(row("A", "B", "C", "Activation"));
  CHECK(rel.insert_fact(row("A", "B", "C", "Activation")).empty());
  try {
    rel.insert_fact(row("A", "B", "C", "Binding"));
    FAIL("expected ConflictingFact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConflictingFact);
  }
  CHECK_THROWS_AS(rel.insert_fact(Row{std::string("A"), std::string("X"), std::string("C"), CNull{}}), Error);

  auto same = rel.insert_predict(row("A", "B", "C", "Activation"), std::vector<SourceId>{kFred});
  CHECK(same.effect == PredictEffect::FactConfirmed);
  CHECK(rel.predict().empty());
  auto rival = rel.insert_predict(row("A", "B", "C", "Binding"), std::vector<SourceId>{kFred});
  CHECK(rival.effect == PredictEffect::FactContradicts);
  REQUIRE(rival.records.size() == 1);
  CHECK_FALSE(rival.records[0].confirmed);
  CHECK(rel.archive().size() == 1);
  rel.check_invariants();
}

TEST_CASE("fill_cell replaces a CNULL candidate") {
  Schema names({{"name", BaseType::String, true, false},
                {"organism", BaseType::String, false, false},
                {"date", BaseType::Date, true, false}},
               false, {"name", "organism"});
  EistRelation rel("Names", names);
  const Row open{std::string("STE11"), std::string("S. cerevisiae"), CNull{}};
  rel.insert_predict(open, std::vector<SourceId>{kRuss});
  CHECK(rel.fill_cell(open, 2, Date{2016, 2, 1}, std::vector<SourceId>{kFred}));
  REQUIRE(rel.predict().size() == 1);
  CHECK(rel.predict()[0].values[2] == Value{Date{2016, 2, 1}});
  CHECK(rel.predict()[0].lineage == L({{kRuss, kFred}}));
  CHECK_FALSE(rel.fill_cell(open, 2, Date{2016, 2, 1}, std::vector<SourceId>{kFred}));
  CHECK_THROWS_AS(rel.fill_cell(open, 0, std::string("x"), std::vector<SourceId>{kFred}), Error);
}

TEST_CASE("restore rejects broken partitions") {
  const auto a = row("A", "B", "C", "Activation");
  const auto b = row("A", "B", "C", "Binding");
  CHECK_THROWS_AS(EistRelation::restore("I", interaction_schema(), {{a, Lineage::fact()}}, {{b, L({{kFred}})}}, {}),
                  Error);
  CHECK_THROWS_AS(EistRelation::restore("I", interaction_schema(), {{a, L({{kFred}})}}, {}, {}), Error);
  CHECK_NOTHROW(EistRelation::restore("I", interaction_schema(), {{a, Lineage::fact()}}, {}, {{b, L({{kFred}})}}));
}

TEST_CASE("partition invariants survive random insert sequences") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_int_distribution<std::uint32_t> src(1, 4);
  const std::vector<std::string> vals{"x", "y", "z"};
  for (int trial = 0; trial < 50; ++trial) {
    EistRelation rel("Interaction", interaction_schema());
    for (int step = 0; step < 30; ++step) {
      Row r = row(vals[pick(rng)], vals[pick(rng)], "org", vals[pick(rng)]);
      if (pick(rng) == 0) {
        try {
          rel.insert_fact(r);
        } catch (const Error& e) {
          CHECK(e.code() == ErrorCode::ConflictingFact);
        }
      } else {
        rel.insert_predict(r, std::vector<SourceId>{SourceId(src(rng))});
      }
      CHECK_NOTHROW(rel.check_invariants());
    }
  }
}
