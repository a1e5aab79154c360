#include <doctest.h>

#include <random>

#include "curelite/common/error.hpp"
#include "curelite/engine/script.hpp"
#include "curelite/workflow/extractor.hpp"
#include "curelite/workflow/levels.hpp"
#include "curelite/workflow/serialize.hpp"
#include "curelite/workflow/workflow.hpp"
#include "support/yeast.hpp"
#include "support/files.hpp"

using namespace curelite;
using namespace curelite::workflow;
using curelite::testing::source;

namespace {

using Action = Submission::Action;

struct Fixture {
  std::unique_ptr<engine::Database> db = testing::yeast_with_tools();
  Workflow wf{*db};

  eist::SourceId id(const std::string& name) const { return source(*db->snapshot(), name); }

  std::uint64_t start(const std::string& text, Tick now = 0, const std::map<std::string, std::int64_t>& params = {}) {
    auto snap = db->snapshot();
    auto p = engine::plan(engine::compile_select(text, snap->catalog), *snap);
    return wf.start(text, p, params, eist::ReliabilityMode::Probabilistic, now);
  }

  std::vector<Task> inbox(const std::string& curator, Tick now = 0) const { return wf.visible_tasks(id(curator), now); }

  SubmitResult approve(std::uint64_t task, const std::string& curator, Tick now = 0) {
    return wf.submit(task, id(curator), {Action::Approve, {}}, now);
  }

  std::vector<eist::EistTuple> predict(const std::string& relation) const {
    return db->snapshot()->relation(relation).predict();
  }
};

eist::Row row(std::vector<std::string> v) { return eist::Row(v.begin(), v.end()); }

std::vector<eist::SourceId> ids(const Fixture& f, std::vector<std::string> names) {
  std::vector<eist::SourceId> out;
  for (const auto& n : names) out.push_back(f.id(n));
  std::sort(out.begin(), out.end());
  return out;
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

const std::string kStaged =
    "SELECT pName, interactor, type USING UniHi ON I_papers LIMIT DATA 3 ROWS "
    "SOURCE r1 BEFORE SELECT eName FROM Experts WHERE laboratory = \"MIT\"; "
    "FROM Interaction WHERE type = \"activation\"";

}  // namespace

TEST_CASE("q3 levels resolve to the Yale experts, then the MIT experts") {
  Fixture f;
  auto snap = f.db->snapshot();
  auto q = engine::compile_select(testing::corpus("q3"), snap->catalog);
  auto levels = resolve_levels(*q.source, *f.db);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].index == 1);
  CHECK(levels[0].origin == "r1");
  CHECK(levels[0].members == ids(f, {"Fred", "Maria"}));
  CHECK(levels[1].origin == "query");
  CHECK(levels[1].members == ids(f, {"Russ", "Karen"}));
  CHECK(f.db->snapshot()->sources.size() == 6);  // nobody new
}

TEST_CASE("q4 resolves its first level per group tuple") {
  Fixture f;
  auto snap = f.db->snapshot();
  auto q = engine::compile_select(testing::corpus("q4"), snap->catalog);
  const eist::Row cerevisiae = row({"X", "Y", "S. cerevisiae", "activation"});
  auto level = resolve_level(q.cluster_source->levels[0], 1, *f.db, {{0, cerevisiae}}, row({"activation"}));
  CHECK(level.members == ids(f, {"Fred", "Russ"}));
  CHECK(level.group_key == row({"activation"}));
  const eist::Row mouse = row({"X", "Y", "M. musculus", "activation"});
  CHECK(code_of([&] { resolve_level(q.cluster_source->levels[0], 1, *f.db, {{0, mouse}}); }) == ErrorCode::EmptyLevel);
}

TEST_CASE("q5 curator tables without a source key use whole tuples as identities") {
  Fixture f;
  auto snap = f.db->snapshot();
  auto q = engine::compile_select(testing::corpus("q5"), snap->catalog);
  auto levels = resolve_levels(*q.source, *f.db);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].members.size() == 2);
  const auto& sources = f.db->snapshot()->sources;
  CHECK(sources.size() == 10);
  CHECK(sources.find({"Fred", "Yale"}) == levels[0].members[0]);
  CHECK(sources.display_name(levels[1].members[0]) == "Karen,MIT");
  CHECK(sources.display_name(levels[1].members[1]) == "Russ,MIT");
}

TEST_CASE("extractor candidates become level-1 review tasks for the first level only") {
  Fixture f;
  const auto qid = f.start(testing::corpus("q3"));
  auto tasks = f.wf.tasks_of(qid);
  REQUIRE(tasks.size() == 5);
  for (const auto& t : tasks) {
    CHECK(t.kind == TaskKind::Review);
    CHECK(t.level == 1);
    CHECK(t.levels == 2);
    CHECK(t.assigned == ids(f, {"Fred", "Maria"}));
    CHECK(t.candidate->contributors == ids(f, {"UniHi"}));
    CHECK_FALSE(t.deadline);
  }
  CHECK(tasks[0].candidate->values == row({"FUS3", "STE7", "S. cerevisiae", "activation"}));
  CHECK(f.inbox("Fred").size() == 5);
  CHECK(f.inbox("Maria").size() == 5);
  CHECK(f.inbox("Karen").empty());
  CHECK(f.inbox("Russ").empty());
  CHECK(f.wf.query(qid).status == QueryStatus::Collecting);
}

TEST_CASE("q2 asks the open crowd for the two missing dates") {
  Fixture f;
  const auto qid = f.start(testing::corpus("q2"));
  auto tasks = f.wf.tasks_of(qid);
  REQUIRE(tasks.size() == 2);
  for (const auto& t : tasks) {
    CHECK(t.kind == TaskKind::CellFill);
    CHECK(t.column == 2u);
    CHECK(t.assigned == ids(f, {"Russ", "Fred", "Karen", "Maria"}));
  }
  // No limits: results are readable while the crowd works.
  CHECK(f.wf.query(qid).ready());

  const auto sho1 = tasks[1];
  REQUIRE(sho1.original->at(0) == eist::Value(std::string("SHO1")));
  auto r = f.wf.submit(sho1.id, f.id("Fred"), {Action::Values, {*eist::Date::parse("2016-08-01")}}, 0);
  CHECK(r.finalized.size() == 1);
  bool found = false;
  for (const auto& t : f.predict("Names")) {
    if (t.values[0] != eist::Value(std::string("SHO1"))) continue;
    found = true;
    CHECK(t.values[2] == eist::Value(*eist::Date::parse("2016-08-01")));
    CHECK(t.lineage == eist::Lineage::from_conjuncts({ids(f, {"Karen", "Fred"})}));
  }
  CHECK(found);
  CHECK(code_of([&] { f.wf.submit(tasks[0].id, f.id("Fred"), {Action::Values, {std::string("x"), std::string("y")}}, 0); }) ==
        ErrorCode::SchemaMismatch);
}

TEST_CASE("a pure query creates no tasks") {
  Fixture f;
  const auto qid = f.start(testing::corpus("q1"));
  CHECK(f.wf.tasks_of(qid).empty());
  CHECK(f.wf.query(qid).status == QueryStatus::Closed);
  CHECK_FALSE(f.wf.query(qid).has_collection);
}

TEST_CASE("approvals climb the levels and finalize with every asserter") {
  Fixture f;
  const auto qid = f.start(testing::corpus("q3"));
  const auto first = f.wf.tasks_of(qid)[0];
  auto r = f.approve(first.id, "Fred");
  REQUIRE(r.created.size() == 1);
  CHECK(r.finalized.empty());
  CHECK(r.task.state == TaskState::Submitted);
  auto next = *f.wf.task(r.created[0]);
  CHECK(next.level == 2);
  CHECK(next.parent == first.id);
  CHECK(next.assigned == ids(f, {"Russ", "Karen"}));
  CHECK(next.candidate->contributors == ids(f, {"UniHi", "Fred"}));
  CHECK(f.inbox("Maria").size() == 4);
  REQUIRE(f.inbox("Karen").size() == 1);

  auto top = f.approve(next.id, "Karen");
  REQUIRE(top.finalized.size() == 1);
  const auto stored = f.predict("Interaction");
  auto it = std::find_if(stored.begin(), stored.end(), [&](const eist::EistTuple& t) { return t.values == first.candidate->values; });
  REQUIRE(it != stored.end());
  CHECK(it->lineage == eist::mk_base_lineage(ids(f, {"Fred", "Karen", "UniHi"})));
  CHECK(engine::provenance(it->lineage, f.db->snapshot()->sources) == "(Fred)|(Karen)|(UniHi)");
}

TEST_CASE("an amendment carries the original forward as a rival") {
  Fixture f;
  const auto qid = f.start(testing::corpus("q3"));
  const auto kss1 = f.wf.tasks_of(qid)[2];
  auto amended = row({"KSS1", "STE7", "S. cerevisiae", "activation"});
  auto r = f.wf.submit(kss1.id, f.id("Maria"), {Action::Amend, amended}, 0);
  REQUIRE(r.created.size() == 2);
  auto a = *f.wf.task(r.created[0]);
  auto b = *f.wf.task(r.created[1]);
  CHECK(a.candidate->values == amended);
  CHECK(a.candidate->contributors == ids(f, {"Maria"}));
  CHECK(b.candidate->values == kss1.candidate->values);
  CHECK(b.candidate->contributors == ids(f, {"UniHi"}));

  f.approve(a.id, "Russ");
  f.approve(b.id, "Karen");
  std::size_t rivals = 0;
  for (const auto& t : f.predict("Interaction")) {
    if (t.values[0] == eist::Value(std::string("KSS1"))) ++rivals;
  }
  CHECK(rivals == 2);
}

TEST_CASE("submission errors") {
  Fixture f;
  const auto qid = f.start(testing::corpus("q3"));
  const auto t = f.wf.tasks_of(qid)[0];
  CHECK(code_of([&] { f.approve(t.id, "Karen"); }) == ErrorCode::NotAssigned);
  CHECK(code_of([&] { f.approve(999, "Fred"); }) == ErrorCode::UnknownTask);
  CHECK(code_of([&] { f.wf.submit(t.id, f.id("Fred"), {Action::Amend, row({"only one"})}, 0); }) ==
        ErrorCode::SchemaMismatch);
  f.approve(t.id, "Fred");
  // First submission wins.
  CHECK(code_of([&] { f.approve(t.id, "Maria"); }) == ErrorCode::TaskClosed);
  CHECK(code_of([&] { f.wf.visible_tasks(eist::SourceId(42), 0); }) == ErrorCode::UnknownCurator);
  CHECK(code_of([&] { f.wf.visible_tasks(eist::SourceId::truth(), 0); }) == ErrorCode::UnknownCurator);
}

TEST_CASE("the row budget stops finalization and closes the query") {
  Fixture f;
  const auto qid = f.start(kStaged);
  CHECK(f.wf.query(qid).limits.rows == 3);
  for (const auto& t : f.wf.tasks_of(qid)) f.approve(t.id, "Fred");
  auto level2 = f.inbox("Karen");
  REQUIRE(level2.size() == 5);
  for (std::size_t i = 0; i < 2; ++i) CHECK_FALSE(f.approve(level2[i].id, "Karen").query_closed);
  auto third = f.approve(level2[2].id, "Karen");
  CHECK(third.query_closed);
  const auto q = f.wf.query(qid);
  CHECK(q.accepted == 3);
  CHECK(q.status == QueryStatus::Closed);
  CHECK(q.close_reason == "row budget");
  CHECK(f.inbox("Karen").empty());
  CHECK(f.wf.task(level2[3].id)->state == TaskState::Cancelled);
  CHECK(code_of([&] { f.approve(level2[3].id, "Karen"); }) == ErrorCode::RowBudgetExhausted);
}

TEST_CASE("deadlines split the time limit over the levels") {
  Fixture f;
  const std::string text =
      "SELECT pName, interactor, type USING UniHi ON I_papers LIMIT TIME 10 UNITS "
      "SOURCE r1 BEFORE SELECT eName FROM Experts WHERE laboratory = \"MIT\"; FROM Interaction";
  const auto qid = f.start(text, 100);
  auto tasks = f.wf.tasks_of(qid);
  REQUIRE(tasks.size() == 5);
  CHECK(tasks[0].deadline == 105);
  f.approve(tasks[0].id, "Fred", 101);

  CHECK(f.wf.tick(104).empty());
  CHECK(f.inbox("Russ", 104).size() == 1);  // only the approved candidate so far
  auto changes = f.wf.tick(105);
  CHECK(changes.size() == 4);
  for (const auto& c : changes) CHECK(c.to == TaskState::Expired);
  CHECK(f.wf.tick(105).empty());
  auto level2 = f.inbox("Russ", 105);
  REQUIRE(level2.size() == 5);
  for (const auto& t : level2) {
    CHECK(t.deadline == 110);
    REQUIRE(t.parent);
    CHECK(f.wf.task(*t.parent)->state != TaskState::Open);
  }
  // An expired candidate travels unreviewed.
  CHECK(level2[1].candidate->contributors == ids(f, {"UniHi"}));
  CHECK(code_of([&] { f.approve(tasks[1].id, "Fred", 105); }) == ErrorCode::TaskClosed);

  f.approve(level2[0].id, "Karen", 107);
  auto final_changes = f.wf.tick(110);
  CHECK(final_changes.size() == 4);
  const auto q = f.wf.query(qid);
  CHECK(q.status == QueryStatus::Closed);
  CHECK(q.close_reason == "time limit");
  CHECK(q.accepted == 5);
  auto stored = f.predict("Interaction");
  auto fus3 = std::find_if(stored.begin(), stored.end(), [](const auto& t) { return t.values[0] == eist::Value(std::string("FUS3")); });
  REQUIRE(fus3 != stored.end());
  CHECK(fus3->lineage == eist::mk_base_lineage(ids(f, {"UniHi", "Fred", "Karen"})));
}

TEST_CASE("an indefinite query stays open and keeps soliciting rows") {
  Fixture f;
  const auto qid = f.start("SELECT pName FROM Interaction SOURCE r1");
  auto tasks = f.wf.tasks_of(qid);
  REQUIRE(tasks.size() == 1);
  CHECK(tasks[0].kind == TaskKind::RowSolicit);
  CHECK(f.wf.tick(1000).empty());
  CHECK(f.wf.query(qid).status == QueryStatus::Collecting);
  auto r = f.wf.submit(tasks[0].id, f.id("Maria"), {Action::Values, row({"STE2", "STE3", "S. pombe", "binding"})}, 0);
  CHECK(r.finalized.size() == 1);
  REQUIRE(r.created.size() == 1);
  CHECK(f.wf.task(r.created[0])->kind == TaskKind::RowSolicit);
  CHECK(f.wf.query(qid).status == QueryStatus::Collecting);
}

TEST_CASE("run_extractor adapters") {
  auto db = testing::yeast_with_tools();
  const auto& schema = db->snapshot()->relation("Interaction").schema();
  cureql::ExtractorDecl file{"UniHi", cureql::ExtractorDecl::Kind::File, "fixtures/unihi", true};
  auto rows = run_extractor(file, std::string("I_papers"), schema);
  REQUIRE(rows.size() == 5);
  CHECK(rows[4] == row({"STE20", "STE11", "S. cerevisiae", "activation"}));
  CHECK(run_extractor(file, std::string("reordered"), schema)[0] == row({"STE11", "STE50", "S. pombe", "binding"}));

  CHECK(code_of([&] { run_extractor(file, std::string("no_type"), schema); }) == ErrorCode::CrowdColumnsUncovered);
  CHECK(code_of([&] { run_extractor(file, std::nullopt, schema); }) == ErrorCode::ExtractorFailure);
  CHECK(code_of([&] { run_extractor(file, std::string("absent"), schema); }) == ErrorCode::AdapterNotFound);
  CHECK(code_of([&] { parse_candidates("pName\tinteractor\torganism\ttype\nA\tB\tC\n", schema, "t"); }) ==
        ErrorCode::MalformedCandidate);
  CHECK(code_of([&] { parse_candidates("pName\tinteractor\torganism\ttype\tcolour\n", schema, "t"); }) ==
        ErrorCode::MalformedCandidate);
  CHECK(code_of([&] { parse_candidates("pName\tinteractor\torganism\ttype\nA\tB\tC\t\n", schema, "t"); }) ==
        ErrorCode::CrowdColumnsUncovered);

  cureql::ExtractorDecl program{"UniHi", cureql::ExtractorDecl::Kind::Program, "fixtures/bin/unihi.sh", false};
  CHECK(run_extractor(program, std::string("I_papers"), schema) == rows);
  CHECK(code_of([&] { run_extractor(program, std::string("absent"), schema); }) == ErrorCode::ExtractorFailure);
  program.location = "fixtures/bin/missing.sh";
  CHECK(code_of([&] { run_extractor(program, std::string("I_papers"), schema); }) == ErrorCode::AdapterNotFound);
}

TEST_CASE("planning fails cleanly when the extractor output is unusable") {
  Fixture f;
  const std::string text = "SELECT pName USING UniHi ON no_type SOURCE r1 FROM Interaction";
  CHECK(code_of([&] { f.start(text); }) == ErrorCode::CrowdColumnsUncovered);
  CHECK(f.wf.state().queries.empty());
  CHECK(f.wf.state().tasks.empty());
}

TEST_CASE("workflow state survives serialization and restore") {
  Fixture f;
  const auto qid = f.start(kStaged, 3);
  f.approve(f.wf.tasks_of(qid)[0].id, "Maria", 4);
  f.wf.submit(f.wf.tasks_of(qid)[1].id, f.id("Fred"), {Action::Amend, row({"STE5", "STE11", "S. cerevisiae", "binding"})}, 4);
  f.start(testing::corpus("q2"), 5);
  const auto state = f.wf.state();
  const auto text = to_jsonl(state);
  CHECK(from_jsonl(text) == state);
  CHECK(to_jsonl(from_jsonl(text)) == text);

  Workflow again(*f.db);
  again.restore(from_jsonl(text));
  CHECK(again.state() == state);
  auto inbox = again.visible_tasks(f.id("Karen"), 6);
  // Three level-2 reviews from the staged query, two cell fills from q2.
  REQUIRE(inbox.size() == 5);
  CHECK(inbox[0].kind == TaskKind::Review);
  CHECK(inbox[4].kind == TaskKind::CellFill);
  CHECK(again.submit(inbox[0].id, f.id("Karen"), {Action::Approve, {}}, 6).finalized.size() == 1);

  CHECK(code_of([] { from_jsonl("{\"next_query\":1,\"next_task\":1}\n{\"task\":{\"id\":1}}\n"); }) == ErrorCode::CorruptFile);
  CHECK(value_from_json(value_to_json(eist::Value(*eist::Date::parse("2016-01-31")))) ==
        eist::Value(*eist::Date::parse("2016-01-31")));
  CHECK(eist::is_cnull(value_from_json(nullptr)));
}

TEST_CASE("visible_tasks never leaks a task to an unassigned curator") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    Fixture f;
    const auto qid = f.start(testing::corpus("q3"), 0);
    const std::vector<std::string> curators{"Russ", "Fred", "Karen", "Maria"};
    for (int step = 0; step < 12; ++step) {
      const auto& who = curators[rng() % curators.size()];
      auto inbox = f.inbox(who, step);
      for (const auto& t : inbox) CHECK(std::binary_search(t.assigned.begin(), t.assigned.end(), f.id(who)));
      if (!inbox.empty()) f.approve(inbox[rng() % inbox.size()].id, who, step);
    }
    for (const auto& t : f.wf.tasks_of(qid)) {
      if (t.level == 2 && t.is_open()) CHECK(f.wf.task(*t.parent)->state == TaskState::Submitted);
    }
  }
}
