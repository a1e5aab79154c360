#include <doctest.h>

#include <fstream>

#include "curelite/common/error.hpp"
#include "curelite/engine/script.hpp"
#include "curelite/storage/storage.hpp"
#include "curelite/workflow/workflow.hpp"
#include "support/yeast.hpp"
#include "support/files.hpp"
#include "support/tempdir.hpp"

using namespace curelite;
namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;

namespace {

std::map<std::string, std::string> dump(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path().string());
  }
  return out;
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

ErrorCode load_error(const fs::path& dir, std::string* message = nullptr) {
  try {
    storage::load_db(dir);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("load_db should have failed");
  return ErrorCode::InvalidArgument;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("the yeast database survives save, load and save byte for byte") {
  auto db = testing::yeast();
  TempDir a, b;
  storage::save_db(*db->snapshot(), {}, a.path());
  auto loaded = storage::load_db(a.path());
  CHECK(loaded.db == *db->snapshot());
  storage::save_db(loaded.db, loaded.workflow, b.path());
  CHECK(dump(a.path()) == dump(b.path()));
}

TEST_CASE("the checked-in yeast directory matches the fixture database") {
  auto loaded = storage::load_db("fixtures/yeast_db");
  CHECK(loaded.db == *testing::yeast()->snapshot());
  REQUIRE(loaded.db.sources.size() == 4);
  CHECK(loaded.db.sources.display_name(loaded.db.sources.from_ordinal(1)) == "Russ");
  CHECK(loaded.db.sources.display_name(loaded.db.sources.from_ordinal(4)) == "Maria");
  CHECK(loaded.db.sources.ordinal(eist::SourceId::truth()) == 5);
  TempDir out;
  storage::save_db(loaded.db, loaded.workflow, out.path());
  auto expected = dump("fixtures/yeast_db");
  expected.erase("lock");
  CHECK(dump(out.path()) == expected);
}

TEST_CASE("yeast database file contents") {
  TempDir dir;
  storage::save_db(*testing::yeast()->snapshot(), {}, dir.path());
  CHECK(read_file((dir / "meta").string()) == "format=1\nn=4\n");
  CHECK(read_file((dir / "sources").string()) ==
        "1\tcurator\tRuss\t0.9\t0\t0\t-\n"
        "2\tcurator\tFred\t0.8\t0\t0\t-\n"
        "3\tcurator\tKaren\t0.85\t0\t0\t-\n"
        "4\tcurator\tMaria\t0.7\t0\t0\t-\n");
  const auto interaction = read_file((dir / "relations/Interaction.tsv").string());
  CHECK(interaction.find("facts\tSTE11,STE7,S. cerevisiae\tactivation\tT\n") != std::string::npos);
  CHECK(interaction.find("predict\tBCK1,MKK1,S. cerevisiae\tPhosphorylation\t0100\n") != std::string::npos);
  CHECK(interaction.find("predict\tSTE11,SHO1,S. cerevisiae\tactivation\t0011\n") != std::string::npos);
  CHECK(interaction.find("archive\tSTE11,STE7,S. pombe\tPhosphorylation\t1010\n") != std::string::npos);
  const auto names = read_file((dir / "relations/Names.tsv").string());
  CHECK(names.find("predict\tSHO1,S. cerevisiae\t\\N\t0010\n") != std::string::npos);
  CHECK(read_file((dir / "journal.jsonl").string()).empty());
}

TEST_CASE("a key present in both facts and predict is rejected") {
  TempDir dir;
  storage::save_db(*testing::yeast()->snapshot(), {}, dir.path());
  const auto path = dir / "relations/Interaction.tsv";
  write(path, read_file(path.string()) + "predict\tSTE11,STE7,S. cerevisiae\tactivation\t1000\n");
  CHECK(load_error(dir.path()) == ErrorCode::InvariantViolation);
}

TEST_CASE("malformed files report the file and line") {
  TempDir dir;
  storage::save_db(*testing::yeast()->snapshot(), {}, dir.path());
  const auto path = dir / "relations/Interaction.tsv";
  const auto original = read_file(path.string());
  std::string message;

  write(path, replace(original, "\t0100\n", "\t0120\n"));
  CHECK(load_error(dir.path(), &message) == ErrorCode::CorruptFile);
  CHECK(message.rfind("relations/Interaction.tsv:", 0) == 0);

  write(path, replace(original, "predict\tBCK1", "guess\tBCK1"));
  CHECK(load_error(dir.path(), &message) == ErrorCode::CorruptFile);

  write(path, replace(original, "BCK1,MKK1,S. cerevisiae", "BCK1,MKK1"));
  CHECK(load_error(dir.path(), &message) == ErrorCode::CorruptFile);

  // A lineage vector longer than the registry allows.
  write(path, replace(original, "\t0100\n", "\t010000\n"));
  CHECK(load_error(dir.path()) == ErrorCode::CorruptFile);

  write(path, original);
  write(dir / "sources", replace(read_file((dir / "sources").string()), "\t0.8\t", "\tabc\t"));
  CHECK(load_error(dir.path(), &message) == ErrorCode::CorruptFile);
  CHECK(message == "sources:2: bad number 'abc'");
}

TEST_CASE("format versions are checked") {
  TempDir dir;
  storage::save_db(*testing::yeast()->snapshot(), {}, dir.path());
  write(dir / "meta", "format=2\nn=4\n");
  CHECK(load_error(dir.path()) == ErrorCode::VersionMismatch);
  write(dir / "meta", "n=4\n");
  CHECK(load_error(dir.path()) == ErrorCode::CorruptFile);
  write(dir / "meta", "format=1\nn=3\n");
  CHECK(load_error(dir.path()) == ErrorCode::CorruptFile);
}

TEST_CASE("an empty or missing directory is an empty database") {
  TempDir dir;
  auto loaded = storage::load_db(dir.path());
  CHECK(loaded.db.relations.empty());
  CHECK(loaded.db.sources.size() == 0);
  CHECK(storage::load_db(dir / "absent").db.catalog.relations.empty());

  write(dir / "sources", "");
  CHECK(load_error(dir.path()) == ErrorCode::CorruptFile);
}

TEST_CASE("values with separators and overrides round-trip") {
  engine::Database db;
  engine::run_script(db, "CREATE TABLE S (k STRING, n NUMBER, d CROWD DATE, PRIMARY KEY (k)); "
                         "INSERT INTO S VALUES (\"a,b\\\\c\", 3, \"2020-01-02\");");
  auto id = db.register_source({"Ann, PhD"}, eist::SourceKind::Curator, 0.3);
  db.set_override(id, 0.125);
  db.insert_predict("S", {std::string("tab\there"), -4.5, eist::CNull{}}, {id});

  TempDir a, b;
  storage::save_db(*db.snapshot(), {}, a.path());
  auto loaded = storage::load_db(a.path());
  CHECK(loaded.db == *db.snapshot());
  storage::save_db(loaded.db, {}, b.path());
  CHECK(dump(a.path()) == dump(b.path()));
  CHECK(read_file((a / "sources").string()) == "1\tcurator\tAnn\\, PhD\t0.3\t0\t0\t0.125\n");
}

TEST_CASE("extractors and workflow state are stored") {
  auto db = testing::yeast_with_tools();
  workflow::Workflow wf(*db);
  const std::string text = testing::corpus("q3");
  auto snap = db->snapshot();
  wf.start(text, engine::plan(engine::compile_select(text, snap->catalog), *snap), {}, eist::ReliabilityMode::Fuzzy, 7);

  TempDir dir;
  storage::save_db(*db->snapshot(), wf.state(), dir.path());
  CHECK(read_file((dir / "extractors").string()) ==
        "PIPs\tfile\tfixtures/pips\tyes\nUniHi\tfile\tfixtures/unihi\tyes\n");
  auto loaded = storage::load_db(dir.path());
  CHECK(loaded.db == *db->snapshot());
  CHECK(loaded.workflow == wf.state());
}

TEST_CASE("journal lines append, read back and are cleared by a save") {
  TempDir dir;
  storage::append_journal(dir.path(), R"({"op":"tick","now":1})");
  storage::append_journal(dir.path(), R"({"op":"tick","now":2})");
  CHECK(storage::read_journal(dir.path()) ==
        std::vector<std::string>{R"({"op":"tick","now":1})", R"({"op":"tick","now":2})"});
  storage::save_db({}, {}, dir.path());
  CHECK(storage::read_journal(dir.path()).empty());
}

TEST_CASE("the directory lock is exclusive") {
  TempDir dir;
  {
    storage::DirLock first(dir.path());
    try {
      storage::DirLock second(dir.path());
      FAIL("second lock acquired");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Locked);
    }
  }
  storage::DirLock again(dir.path());
}
