#include "curelite/eist/lineage.hpp"

#include <algorithm>

#include "curelite/common/error.hpp"

namespace curelite::eist {

namespace {

bool is_subset(const Lineage::Conjunct& small, const Lineage::Conjunct& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

std::vector<Lineage::Conjunct> minimize(std::vector<Lineage::Conjunct> conjuncts) {
  for (auto& c : conjuncts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    // T is always correct, so it is the identity of conjunction.
    if (c.size() > 1) std::erase(c, SourceId::truth());
  }
  const Lineage::Conjunct truth_only{SourceId::truth()};
  if (std::find(conjuncts.begin(), conjuncts.end(), truth_only) != conjuncts.end()) {
    return {truth_only};
  }

  std::sort(conjuncts.begin(), conjuncts.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  conjuncts.erase(std::unique(conjuncts.begin(), conjuncts.end()), conjuncts.end());

  std::vector<Lineage::Conjunct> kept;
  for (auto& c : conjuncts) {
    bool absorbed = std::any_of(kept.begin(), kept.end(), [&](const auto& k) { return is_subset(k, c); });
    if (!absorbed) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

Lineage Lineage::fact() {
  Lineage l;
  l.conjuncts_ = {{SourceId::truth()}};
  return l;
}

Lineage Lineage::from_conjuncts(std::vector<Conjunct> conjuncts) {
  if (conjuncts.empty()) throw Error(ErrorCode::EmptyContributors, "lineage needs at least one derivation");
  for (const auto& c : conjuncts) {
    if (c.empty()) throw Error(ErrorCode::EmptyContributors, "lineage derivation has no sources");
  }
  Lineage l;
  l.conjuncts_ = minimize(std::move(conjuncts));
  return l;
}

bool Lineage::is_fact() const {
  return conjuncts_.size() == 1 && conjuncts_[0].size() == 1 && conjuncts_[0][0].is_truth();
}

bool Lineage::is_base_form() const {
  return std::all_of(conjuncts_.begin(), conjuncts_.end(), [](const auto& c) { return c.size() == 1; });
}

std::vector<SourceId> Lineage::sources() const {
  std::vector<SourceId> out;
  for (const auto& c : conjuncts_) out.insert(out.end(), c.begin(), c.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Lineage mk_base_lineage(std::span<const SourceId> contributors) {
  if (contributors.empty()) throw Error(ErrorCode::EmptyContributors, "a base tuple needs at least one contributor");
  const bool has_truth = std::any_of(contributors.begin(), contributors.end(), [](SourceId s) { return s.is_truth(); });
  if (has_truth) {
    const bool only_truth =
        std::all_of(contributors.begin(), contributors.end(), [](SourceId s) { return s.is_truth(); });
    if (!only_truth) {
      throw Error(ErrorCode::MixedFactContributors, "T cannot contribute together with ordinary sources");
    }
    return Lineage::fact();
  }
  std::vector<Lineage::Conjunct> conjuncts;
  conjuncts.reserve(contributors.size());
  for (SourceId s : contributors) conjuncts.push_back({s});
  return Lineage::from_conjuncts(std::move(conjuncts));
}

Lineage lineage_and(const Lineage& a, const Lineage& b) {
  std::vector<Lineage::Conjunct> product;
  product.reserve(a.conjuncts().size() * b.conjuncts().size());
  for (const auto& ca : a.conjuncts()) {
    for (const auto& cb : b.conjuncts()) {
      Lineage::Conjunct merged;
      std::set_union(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(merged));
      product.push_back(std::move(merged));
    }
  }
  return Lineage::from_conjuncts(std::move(product));
}

Lineage lineage_or(const Lineage& a, const Lineage& b) {
  std::vector<Lineage::Conjunct> all = a.conjuncts();
  all.insert(all.end(), b.conjuncts().begin(), b.conjuncts().end());
  return Lineage::from_conjuncts(std::move(all));
}

}  // namespace curelite::eist
