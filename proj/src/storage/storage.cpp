#include "curelite/storage/storage.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "curelite/common/error.hpp"
#include "curelite/cureql/parser.hpp"
#include "curelite/cureql/printer.hpp"
#include "curelite/cureql/validator.hpp"
#include "curelite/eist/lineage_text.hpp"
#include "curelite/workflow/serialize.hpp"

namespace curelite::storage {

namespace fs = std::filesystem;

namespace {

const char* const kSections[] = {"facts", "predict", "archive"};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot replace " + path.string() + ": " + ec.message());
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto at = line.find(sep, start);
    out.push_back(line.substr(start, at == std::string::npos ? std::string::npos : at - start));
    if (at == std::string::npos) return out;
    start = at + 1;
  }
}

struct Where {
  std::string file;
  int line = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::CorruptFile, file + ":" + std::to_string(line) + ": " + why);
  }
};

template <typename T>
T parse_number(const std::string& text, const Where& at) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) at.fail("bad number '" + text + "'");
  return v;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case ',': out += "\\,"; break;
      default: out += c;
    }
  }
  return out;
}

// Splits on unescaped commas, resolving escapes. CNULL pieces come back as nullopt.
std::vector<std::optional<std::string>> split_values(std::string_view text) {
  std::vector<std::optional<std::string>> out;
  std::string cur;
  bool cnull = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ',') {
      out.push_back(cnull ? std::nullopt : std::optional<std::string>(cur));
      cur.clear();
      cnull = false;
      continue;
    }
    if (c != '\\') {
      cur += c;
      continue;
    }
    if (++i == text.size()) throw Error(ErrorCode::CorruptFile, "dangling escape");
    switch (text[i]) {
      case '\\': cur += '\\'; break;
      case 't': cur += '\t'; break;
      case 'n': cur += '\n'; break;
      case ',': cur += ','; break;
      case 'N':
        if (!cur.empty() || (i + 1 < text.size() && text[i + 1] != ',')) throw Error(ErrorCode::CorruptFile, "misplaced \\N");
        cnull = true;
        break;
      default: throw Error(ErrorCode::CorruptFile, std::string("unknown escape \\") + text[i]);
    }
  }
  out.push_back(cnull ? std::nullopt : std::optional<std::string>(cur));
  return out;
}

std::string kind_name(eist::SourceKind k) { return k == eist::SourceKind::Curator ? "curator" : "extractor"; }

std::string catalog_text(const cureql::Catalog& catalog) {
  std::string out;
  for (const auto& [name, schema] : catalog.relations) out += cureql::pretty_print(cureql::to_ddl(name, schema)) + "\n";
  for (const auto& [name, query] : catalog.views) {
    out += cureql::pretty_print(cureql::CreateViewStmt{name, query, {}}) + "\n";
  }
  return out;
}

std::string sources_text(const eist::SourceRegistry& sources) {
  std::string out;
  for (const auto& p : sources.profiles()) {
    eist::Row key(p.key_values.begin(), p.key_values.end());
    out += std::to_string(p.source.value()) + "\t" + kind_name(p.kind) + "\t" + encode_values(key) + "\t" +
           eist::format_number(p.reliability) + "\t" + std::to_string(p.confirmed) + "\t" + std::to_string(p.resolved) +
           "\t" + (p.overridden ? eist::format_number(*p.overridden) : "-") + "\n";
  }
  return out;
}

std::string relation_text(const eist::EistRelation& rel, std::size_t n) {
  std::string out;
  const std::vector<eist::EistTuple>* parts[] = {&rel.facts(), &rel.predict(), &rel.archive()};
  for (std::size_t s = 0; s < 3; ++s) {
    for (const auto& t : *parts[s]) {
      out += std::string(kSections[s]) + "\t" + encode_values(rel.schema().key_of(t.values)) + "\t" +
             encode_values(rel.schema().non_key_of(t.values)) + "\t" + eist::to_storage_text(t.lineage, n) + "\n";
    }
  }
  return out;
}

std::string extractors_text(const cureql::Catalog& catalog) {
  std::string out;
  for (const auto& [name, e] : catalog.extractors) {
    out += name + "\t" + (e.kind == cureql::ExtractorDecl::Kind::File ? "file" : "program") + "\t" + e.location + "\t" +
           (e.requires_input ? "yes" : "no") + "\n";
  }
  return out;
}

cureql::Catalog load_catalog(const fs::path& dir) {
  cureql::Catalog catalog;
  const auto path = dir / "catalog";
  if (!fs::exists(path)) return catalog;
  const auto lines = lines_of(slurp(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Where at{"catalog", static_cast<int>(i + 1)};
    if (lines[i].empty()) continue;
    auto parsed = cureql::parse(lines[i]);
    if (!parsed.ok()) at.fail(cureql::render(parsed.diagnostics));
    auto v = cureql::validate(*parsed.statement, catalog);
    if (!v.ok()) at.fail(cureql::render(v.diagnostics));
    if (auto* t = std::get_if<cureql::TypedCreateTable>(&*v.statement)) {
      catalog.relations.emplace(t->name, t->schema);
    } else if (auto* view = std::get_if<cureql::TypedCreateView>(&*v.statement)) {
      catalog.views.emplace(view->name, view->query);
    } else {
      at.fail("only CREATE statements belong in the catalog");
    }
  }
  return catalog;
}

void load_extractors(const fs::path& dir, cureql::Catalog& catalog) {
  const auto path = dir / "extractors";
  if (!fs::exists(path)) return;
  const auto lines = lines_of(slurp(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Where at{"extractors", static_cast<int>(i + 1)};
    auto f = split(lines[i], '\t');
    if (f.size() != 4 || (f[1] != "file" && f[1] != "program") || (f[3] != "yes" && f[3] != "no")) {
      at.fail("expected name, file|program, location, yes|no");
    }
    catalog.extractors[f[0]] = cureql::ExtractorDecl{
        f[0], f[1] == "file" ? cureql::ExtractorDecl::Kind::File : cureql::ExtractorDecl::Kind::Program, f[2], f[3] == "yes"};
  }
}

std::vector<eist::SourceProfile> load_sources(const fs::path& dir) {
  std::vector<eist::SourceProfile> out;
  const auto path = dir / "sources";
  if (!fs::exists(path)) return out;
  const auto lines = lines_of(slurp(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Where at{"sources", static_cast<int>(i + 1)};
    auto f = split(lines[i], '\t');
    if (f.size() != 7) at.fail("expected 7 fields");
    eist::SourceProfile p;
    const auto ordinal = parse_number<std::uint32_t>(f[0], at);
    if (ordinal != i + 1) at.fail("ordinals must run 1, 2, ...");
    p.source = eist::SourceId(ordinal);
    if (f[1] != "curator" && f[1] != "extractor") at.fail("unknown source kind '" + f[1] + "'");
    p.kind = f[1] == "curator" ? eist::SourceKind::Curator : eist::SourceKind::Extractor;
    try {
      for (auto& piece : split_values(f[2])) {
        if (!piece) at.fail("a source key cannot be CNULL");
        p.key_values.push_back(*piece);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CorruptFile || std::string(e.what()).find(':') != std::string::npos) throw;
      at.fail(e.what());
    }
    p.reliability = parse_number<double>(f[3], at);
    p.confirmed = parse_number<std::uint64_t>(f[4], at);
    p.resolved = parse_number<std::uint64_t>(f[5], at);
    if (f[6] != "-") p.overridden = parse_number<double>(f[6], at);
    out.push_back(std::move(p));
  }
  return out;
}

std::shared_ptr<const eist::EistRelation> load_relation(const fs::path& dir, const std::string& name,
                                                        const eist::Schema& schema, const eist::SourceRegistry& sources) {
  std::vector<eist::BaseType> key_types, other_types;
  for (std::size_t i = 0; i < schema.arity(); ++i) {
    (schema.is_key_column(i) ? key_types : other_types).push_back(schema.attributes()[i].type);
  }
  std::vector<eist::EistTuple> parts[3];
  const auto path = dir / "relations" / (name + ".tsv");
  if (fs::exists(path)) {
    const auto lines = lines_of(slurp(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const Where at{"relations/" + name + ".tsv", static_cast<int>(i + 1)};
      auto f = split(lines[i], '\t');
      if (f.size() != 4) at.fail("expected section, key, values, lineage");
      std::size_t section = 3;
      for (std::size_t s = 0; s < 3; ++s) {
        if (f[0] == kSections[s]) section = s;
      }
      if (section == 3) at.fail("unknown section '" + f[0] + "'");
      eist::Row key, rest;
      eist::Lineage lineage;
      try {
        key = decode_values(f[1], key_types);
        rest = decode_values(f[2], other_types);
        lineage = eist::parse_storage_text(f[3], sources.size());
      } catch (const Error& e) {
        at.fail(e.what());
      }
      for (auto id : lineage.sources()) {
        if (!id.is_truth() && !sources.contains(id)) at.fail("lineage names an unregistered source");
      }
      eist::Row values(schema.arity());
      std::size_t k = 0, r = 0;
      for (std::size_t c = 0; c < schema.arity(); ++c) values[c] = schema.is_key_column(c) ? key[k++] : rest[r++];
      parts[section].push_back(eist::EistTuple{std::move(values), std::move(lineage)});
    }
  }
  return std::make_shared<const eist::EistRelation>(
      eist::EistRelation::restore(name, schema, std::move(parts[0]), std::move(parts[1]), std::move(parts[2])));
}

}  // namespace

std::string encode_values(const eist::Row& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += eist::is_cnull(values[i]) ? std::string("\\N") : escape(eist::render_value(values[i]));
  }
  return out;
}

eist::Row decode_values(std::string_view text, const std::vector<eist::BaseType>& types) {
  if (types.empty()) {
    if (!text.empty()) throw Error(ErrorCode::CorruptFile, "expected no values");
    return {};
  }
  auto pieces = split_values(text);
  if (pieces.size() != types.size()) {
    throw Error(ErrorCode::CorruptFile, "expected " + std::to_string(types.size()) + " values, found " +
                                            std::to_string(pieces.size()));
  }
  eist::Row out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!pieces[i]) {
      out.emplace_back(eist::CNull{});
      continue;
    }
    auto v = eist::parse_value(*pieces[i], types[i]);
    if (!v) throw Error(ErrorCode::CorruptFile, "bad " + std::string(eist::to_string(types[i])) + " '" + *pieces[i] + "'");
    out.push_back(std::move(*v));
  }
  return out;
}

void save_db(const engine::DatabaseState& db, const workflow::WorkflowState& workflow, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "relations", ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  const std::size_t n = db.sources.size();
  write_file(dir / "meta", "format=" + std::to_string(kFormatVersion) + "\nn=" + std::to_string(n) + "\n");
  write_file(dir / "catalog", catalog_text(db.catalog));
  write_file(dir / "extractors", extractors_text(db.catalog));
  write_file(dir / "sources", sources_text(db.sources));
  for (const auto& [name, rel] : db.relations) write_file(dir / "relations" / (name + ".tsv"), relation_text(*rel, n));
  for (const auto& entry : fs::directory_iterator(dir / "relations")) {
    const auto stem = entry.path().stem().string();
    if (entry.path().extension() == ".tsv" && !db.relations.count(stem)) fs::remove(entry.path(), ec);
  }
  write_file(dir / "tasks.jsonl", workflow::to_jsonl(workflow));
  write_file(dir / "journal.jsonl", "");
}

Stored load_db(const fs::path& dir) {
  Stored out;
  if (!fs::exists(dir / "meta")) {
    if (fs::exists(dir) && !fs::is_empty(dir)) {
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().filename() != "lock") throw Error(ErrorCode::CorruptFile, dir.string() + ": missing meta");
      }
    }
    return out;
  }
  const auto meta = lines_of(slurp(dir / "meta"));
  std::optional<int> format;
  std::optional<std::size_t> n;
  for (std::size_t i = 0; i < meta.size(); ++i) {
    const Where at{"meta", static_cast<int>(i + 1)};
    if (meta[i].rfind("format=", 0) == 0) {
      format = parse_number<int>(meta[i].substr(7), at);
    } else if (meta[i].rfind("n=", 0) == 0) {
      n = parse_number<std::size_t>(meta[i].substr(2), at);
    } else if (!meta[i].empty()) {
      at.fail("unknown entry");
    }
  }
  if (!format || !n) throw Error(ErrorCode::CorruptFile, "meta: format and n are required");
  if (*format != kFormatVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "format " + std::to_string(*format) + " but this build reads " + std::to_string(kFormatVersion));
  }

  out.db.catalog = load_catalog(dir);
  load_extractors(dir, out.db.catalog);
  out.db.sources.replace_profiles(load_sources(dir));
  if (out.db.sources.size() != *n) {
    throw Error(ErrorCode::CorruptFile, "meta: n=" + std::to_string(*n) + " but sources lists " +
                                            std::to_string(out.db.sources.size()));
  }
  for (const auto& [name, schema] : out.db.catalog.relations) {
    out.db.relations.emplace(name, load_relation(dir, name, schema, out.db.sources));
  }
  if (fs::exists(dir / "relations")) {
    for (const auto& entry : fs::directory_iterator(dir / "relations")) {
      if (!out.db.relations.count(entry.path().stem().string())) {
        throw Error(ErrorCode::CorruptFile, entry.path().string() + ": relation is not in the catalog");
      }
    }
  }
  if (fs::exists(dir / "tasks.jsonl")) {
    try {
      out.workflow = workflow::from_jsonl(slurp(dir / "tasks.jsonl"));
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptFile, std::string("tasks.jsonl: ") + e.what());
    }
  }
  return out;
}

void append_journal(const fs::path& dir, const std::string& line) {
  std::ofstream out(dir / "journal.jsonl", std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot append to " + (dir / "journal.jsonl").string());
  out << line << "\n";
  if (!out.flush()) throw Error(ErrorCode::IoFailure, "cannot append to " + (dir / "journal.jsonl").string());
}

std::vector<std::string> read_journal(const fs::path& dir) {
  if (!fs::exists(dir / "journal.jsonl")) return {};
  std::vector<std::string> out;
  for (auto& line : lines_of(slurp(dir / "journal.jsonl"))) {
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

DirLock::DirLock(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const auto path = (dir / "lock").string();
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::Locked, dir.string() + " is in use by another process");
  }
}

DirLock::~DirLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

}  // namespace curelite::storage
