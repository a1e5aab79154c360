#include "curelite/eist/relation.hpp"

#include <algorithm>
#include <set>

#include "curelite/common/error.hpp"

namespace curelite::eist {

namespace {

void insert_sorted(std::vector<EistTuple>& part, EistTuple tuple) {
  auto pos = std::lower_bound(part.begin(), part.end(), tuple);
  part.insert(pos, std::move(tuple));
}

std::vector<SourceId> ordinary_contributors(const Lineage& lineage) {
  auto sources = lineage.sources();
  std::erase(sources, SourceId::truth());
  return sources;
}

void check_contributors(std::span<const SourceId> contributors) {
  if (contributors.empty()) throw Error(ErrorCode::EmptyContributors, "a prediction needs at least one contributor");
  if (std::any_of(contributors.begin(), contributors.end(), [](SourceId s) { return s.is_truth(); })) {
    throw Error(ErrorCode::FactContributor, "T contributes facts, not predictions; use insert_fact");
  }
}

}  // namespace

EistRelation::EistRelation(std::string name, Schema schema) : name_(std::move(name)), schema_(std::move(schema)) {}

EistRelation EistRelation::restore(std::string name, Schema schema, std::vector<EistTuple> facts,
                                   std::vector<EistTuple> predict, std::vector<EistTuple> archive) {
  EistRelation rel(std::move(name), std::move(schema));
  rel.facts_ = std::move(facts);
  rel.predict_ = std::move(predict);
  rel.archive_ = std::move(archive);
  std::sort(rel.facts_.begin(), rel.facts_.end());
  std::sort(rel.predict_.begin(), rel.predict_.end());
  std::sort(rel.archive_.begin(), rel.archive_.end());
  rel.check_invariants();
  return rel;
}

const EistTuple* EistRelation::find_fact(const Row& key) const {
  for (const auto& f : facts_) {
    if (schema_.key_of(f.values) == key) return &f;
  }
  return nullptr;
}

void EistRelation::put_predict(EistTuple tuple) {
  auto same = std::find_if(predict_.begin(), predict_.end(), [&](const EistTuple& t) { return t.values == tuple.values; });
  if (same != predict_.end()) {
    EistTuple merged{same->values, lineage_or(same->lineage, tuple.lineage)};
    predict_.erase(same);
    insert_sorted(predict_, std::move(merged));
    return;
  }
  insert_sorted(predict_, std::move(tuple));
}

PredictOutcome EistRelation::insert_predict(Row values, std::span<const SourceId> contributors) {
  schema_.check_row(values, /*allow_cnull=*/true);
  check_contributors(contributors);
  Lineage lineage = mk_base_lineage(contributors);

  const Row key = schema_.key_of(values);
  if (const EistTuple* fact = find_fact(key)) {
    if (fact->values == values) return {PredictEffect::FactConfirmed, {}};
    // A prediction that contradicts a known fact is resolved on arrival.
    ResolutionRecord record{name_, key, schema_.non_key_of(values), schema_.non_key_of(fact->values),
                            ordinary_contributors(lineage), false};
    insert_sorted(archive_, EistTuple{std::move(values), std::move(lineage)});
    return {PredictEffect::FactContradicts, {std::move(record)}};
  }

  const bool existed =
      std::any_of(predict_.begin(), predict_.end(), [&](const EistTuple& t) { return t.values == values; });
  put_predict(EistTuple{std::move(values), std::move(lineage)});
  return {existed ? PredictEffect::Merged : PredictEffect::Added, {}};
}

std::vector<ResolutionRecord> EistRelation::insert_fact(Row values) {
  schema_.check_row(values, /*allow_cnull=*/false);
  const Row key = schema_.key_of(values);
  if (const EistTuple* existing = find_fact(key)) {
    if (existing->values == values) return {};
    throw Error(ErrorCode::ConflictingFact, "relation '" + name_ + "' already holds a different fact for this key");
  }

  std::vector<ResolutionRecord> records;
  const Row fact_non_key = schema_.non_key_of(values);
  std::vector<EistTuple> remaining;
  for (auto& candidate : predict_) {
    if (schema_.key_of(candidate.values) != key) {
      remaining.push_back(std::move(candidate));
      continue;
    }
    Row predicted = schema_.non_key_of(candidate.values);
    const bool confirmed = predicted == fact_non_key;
    records.push_back(ResolutionRecord{name_, key, std::move(predicted), fact_non_key,
                                       ordinary_contributors(candidate.lineage), confirmed});
    insert_sorted(archive_, std::move(candidate));
  }
  predict_ = std::move(remaining);
  insert_sorted(facts_, EistTuple{std::move(values), Lineage::fact()});
  return records;
}

bool EistRelation::fill_cell(const Row& original, std::size_t column, Value value,
                             std::span<const SourceId> contributors) {
  check_contributors(contributors);
  if (column >= schema_.arity() || schema_.is_key_column(column)) {
    throw Error(ErrorCode::SchemaMismatch, "cell fills must target a non-key column");
  }
  auto it = std::find_if(predict_.begin(), predict_.end(), [&](const EistTuple& t) { return t.values == original; });
  if (it == predict_.end() || !is_cnull(it->values[column])) return false;

  EistTuple filled = *it;
  filled.values[column] = std::move(value);
  schema_.check_row(filled.values, /*allow_cnull=*/true);
  filled.lineage = lineage_and(filled.lineage, mk_base_lineage(contributors));
  predict_.erase(it);

  if (const EistTuple* fact = find_fact(schema_.key_of(filled.values)); fact != nullptr) {
    insert_sorted(archive_, std::move(filled));
    return true;
  }
  put_predict(std::move(filled));
  return true;
}

void EistRelation::add_archived(EistTuple tuple) {
  schema_.check_row(tuple.values, true);
  insert_sorted(archive_, std::move(tuple));
}

void EistRelation::check_invariants() const {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::InvariantViolation, "relation '" + name_ + "': " + what);
  };
  std::set<Row> fact_keys;
  for (const auto& f : facts_) {
    try {
      schema_.check_row(f.values, false);
    } catch (const Error& e) {
      fail(std::string("facts tuple: ") + e.what());
    }
    if (!f.lineage.is_fact()) fail("facts tuple with lineage other than {{T}}");
    if (!fact_keys.insert(schema_.key_of(f.values)).second) fail("two facts share a primary key");
  }
  for (const auto& p : predict_) {
    try {
      schema_.check_row(p.values, true);
    } catch (const Error& e) {
      fail(std::string("predict tuple: ") + e.what());
    }
    if (p.lineage.is_fact()) fail("predict tuple with lineage {{T}}");
    if (fact_keys.count(schema_.key_of(p.values))) fail("primary key present in both facts and predict");
  }
  for (std::size_t i = 1; i < predict_.size(); ++i) {
    if (predict_[i - 1].values == predict_[i].values) fail("duplicate predict tuple values");
  }
  for (const auto& a : archive_) {
    try {
      schema_.check_row(a.values, true);
    } catch (const Error& e) {
      fail(std::string("archive tuple: ") + e.what());
    }
  }
}

}  // namespace curelite::eist
