#pragma once

#include <span>
#include <string>
#include <vector>

#include "curelite/eist/lineage.hpp"
#include "curelite/eist/schema.hpp"

namespace curelite::eist {

struct EistTuple {
  Row values;
  Lineage lineage;

  auto operator<=>(const EistTuple&) const = default;
};

/// Outcome of resolving one predicted tuple against a newly known fact.
struct ResolutionRecord {
  std::string relation;
  Row key;
  Row predicted_values;
  Row fact_values;
  std::vector<SourceId> contributors;  // never contains T
  bool confirmed = false;

  friend bool operator==(const ResolutionRecord&, const ResolutionRecord&) = default;
};

enum class PredictEffect {
  Added,           // new candidate tuple
  Merged,          // identical candidate existed; lineages or-ed
  FactConfirmed,   // an identical fact already exists; nothing stored
  FactContradicts, // the key is already a fact with other values; archived at once
};

struct PredictOutcome {
  PredictEffect effect;
  std::vector<ResolutionRecord> records;
};

/// One eIST relation: Facts (lineage {{T}}), Predict (uncertain candidates,
/// possibly several per key) and Archive (resolved predictions kept only for
/// credibility scoring). Each partition is kept sorted.
class EistRelation {
 public:
  EistRelation() = default;
  EistRelation(std::string name, Schema schema);

  /// Rebuilds a relation from stored partitions, checking every invariant.
  /// Throws InvariantViolation.
  static EistRelation restore(std::string name, Schema schema, std::vector<EistTuple> facts,
                              std::vector<EistTuple> predict, std::vector<EistTuple> archive);

  const std::string& name() const { return name_; }
  const Schema& schema() const { return schema_; }
  const std::vector<EistTuple>& facts() const { return facts_; }
  const std::vector<EistTuple>& predict() const { return predict_; }
  const std::vector<EistTuple>& archive() const { return archive_; }

  PredictOutcome insert_predict(Row values, std::span<const SourceId> contributors);

  /// Adds a certain tuple and migrates every key-matching candidate to Archive.
  std::vector<ResolutionRecord> insert_fact(Row values);

  /// Replaces the candidate `original` (which holds CNULL at `column`) by a
  /// copy carrying `value`, conjoining its lineage with the filling sources.
  /// Returns false when no such candidate exists any more.
  bool fill_cell(const Row& original, std::size_t column, Value value, std::span<const SourceId> contributors);

  /// Appends directly to Archive; used when replaying stored state.
  void add_archived(EistTuple tuple);

  /// Throws InvariantViolation describing the first broken partition rule.
  void check_invariants() const;

  friend bool operator==(const EistRelation&, const EistRelation&) = default;

 private:
  const EistTuple* find_fact(const Row& key) const;
  void put_predict(EistTuple tuple);

  std::string name_;
  Schema schema_;
  std::vector<EistTuple> facts_;
  std::vector<EistTuple> predict_;
  std::vector<EistTuple> archive_;
};

}  // namespace curelite::eist
