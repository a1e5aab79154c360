#pragma once

#include <compare>
#include <span>
#include <vector>

#include "curelite/eist/source.hpp"

namespace curelite::eist {

/// Positive DNF over sources. Each conjunct is one independent derivation that
/// holds when all of its sources are correct; the tuple holds when any
/// derivation does.
///
/// Always kept in normal form: conjuncts sorted and free of duplicates, no
/// conjunct a superset of another, and T appears only as the sole member of
/// the sole conjunct ({{T}}, a fact).
class Lineage {
 public:
  using Conjunct = std::vector<SourceId>;

  /// {{T}}.
  static Lineage fact();

  /// Normalizes arbitrary conjuncts. Throws EmptyContributors when the
  /// formula or any conjunct is empty.
  static Lineage from_conjuncts(std::vector<Conjunct> conjuncts);

  const std::vector<Conjunct>& conjuncts() const { return conjuncts_; }

  bool is_fact() const;
  /// Every conjunct a singleton (what the bit-vector encoding can express).
  bool is_base_form() const;
  /// Distinct sources, ascending.
  std::vector<SourceId> sources() const;

  auto operator<=>(const Lineage&) const = default;

 private:
  std::vector<Conjunct> conjuncts_;
};

/// Lineage of a base tuple contributed independently by each source.
Lineage mk_base_lineage(std::span<const SourceId> contributors);

/// Conjunction (join): distributed product of conjuncts.
Lineage lineage_and(const Lineage& a, const Lineage& b);

/// Disjunction (duplicate elimination / union of alternative derivations).
Lineage lineage_or(const Lineage& a, const Lineage& b);

/// Normal form of a conjunct list; exposed for property tests.
std::vector<Lineage::Conjunct> minimize(std::vector<Lineage::Conjunct> conjuncts);

}  // namespace curelite::eist
