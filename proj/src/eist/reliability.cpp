#include "curelite/eist/reliability.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "curelite/common/error.hpp"
#include "curelite/eist/relation.hpp"

namespace curelite::eist {

namespace {

using Mask = std::uint64_t;
using Formula = std::vector<Mask>;  // DNF; each mask is one conjunct over local indices

double lookup_or_throw(const ReliabilityLookup& reliabilities, SourceId id) {
  if (id.is_truth()) return 1.0;
  auto r = reliabilities(id);
  if (!r) throw Error(ErrorCode::UnknownSource, "no reliability for source " + std::to_string(id.value()));
  return *r;
}

// Drops conjuncts that are supersets of others; keeps a canonical order so the
// memo table sees equal formulas as equal keys.
void absorb(Formula& f) {
  std::sort(f.begin(), f.end(), [](Mask a, Mask b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  f.erase(std::unique(f.begin(), f.end()), f.end());
  Formula kept;
  for (Mask m : f) {
    bool absorbed = std::any_of(kept.begin(), kept.end(), [m](Mask k) { return (k & m) == k; });
    if (!absorbed) kept.push_back(m);
  }
  std::sort(kept.begin(), kept.end());
  f = std::move(kept);
}

class ShannonExpander {
 public:
  explicit ShannonExpander(std::vector<double> probs) : probs_(std::move(probs)) {}

  double probability(Formula f) {
    absorb(f);
    return solve(f);
  }

 private:
  double solve(const Formula& f) {
    if (f.empty()) return 0.0;
    if (std::find(f.begin(), f.end(), Mask{0}) != f.end()) return 1.0;
    if (f.size() == 1) {
      double p = 1.0;
      for (Mask m = f[0]; m; m &= m - 1) p *= probs_[std::countr_zero(m)];
      return p;
    }
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;

    int pivot = most_frequent(f);
    const Mask bit = Mask{1} << pivot;
    Formula when_true, when_false;
    for (Mask m : f) {
      when_true.push_back(m & ~bit);
      if (!(m & bit)) when_false.push_back(m);
    }
    absorb(when_true);
    // Removing conjuncts cannot create new subsumptions.
    const double p = probs_[pivot];
    const double result = p * solve(when_true) + (1.0 - p) * solve(when_false);
    memo_.emplace(f, result);
    return result;
  }

  int most_frequent(const Formula& f) const {
    std::vector<int> counts(probs_.size(), 0);
    for (Mask m : f) {
      for (Mask r = m; r; r &= r - 1) ++counts[std::countr_zero(r)];
    }
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  std::vector<double> probs_;
  std::map<Formula, double> memo_;
};

}  // namespace

double reliability_prob(const Lineage& lineage, const ReliabilityLookup& reliabilities,
                        std::size_t max_distinct_sources) {
  if (lineage.is_fact()) return 1.0;
  const auto sources = lineage.sources();
  if (sources.size() > max_distinct_sources || sources.size() > 64) {
    throw Error(ErrorCode::TooManyDistinctSources,
                "lineage mentions " + std::to_string(sources.size()) + " distinct sources; cap is " +
                    std::to_string(std::min<std::size_t>(max_distinct_sources, 64)));
  }
  std::vector<double> probs;
  probs.reserve(sources.size());
  for (SourceId s : sources) probs.push_back(lookup_or_throw(reliabilities, s));

  Formula f;
  for (const auto& conjunct : lineage.conjuncts()) {
    Mask m = 0;
    for (SourceId s : conjunct) {
      auto idx = std::lower_bound(sources.begin(), sources.end(), s) - sources.begin();
      m |= Mask{1} << idx;
    }
    f.push_back(m);
  }
  return ShannonExpander(std::move(probs)).probability(std::move(f));
}

double reliability_fuzzy(const Lineage& lineage, const ReliabilityLookup& reliabilities) {
  double best = 0.0;
  for (const auto& conjunct : lineage.conjuncts()) {
    double weakest = 1.0;
    for (SourceId s : conjunct) weakest = std::min(weakest, lookup_or_throw(reliabilities, s));
    best = std::max(best, weakest);
  }
  return best;
}

double reliability(const Lineage& lineage, const ReliabilityLookup& reliabilities, ReliabilityMode mode) {
  return mode == ReliabilityMode::Probabilistic ? reliability_prob(lineage, reliabilities)
                                                : reliability_fuzzy(lineage, reliabilities);
}

double credibility(std::uint64_t confirmed, std::uint64_t resolved, const CredibilityParams& params) {
  const double value = (static_cast<double>(confirmed) + params.pseudo_count * params.prior) /
                       (static_cast<double>(resolved) + params.pseudo_count);
  return std::clamp(value, params.floor, 1.0);
}

void update_reliabilities(const std::vector<ResolutionRecord>& records, SourceRegistry& registry,
                          const CredibilityParams& params) {
  std::map<SourceId, std::pair<std::uint64_t, std::uint64_t>> tally;
  for (const auto& record : records) {
    for (SourceId s : record.contributors) {
      if (s.is_truth()) continue;
      if (!registry.contains(s)) {
        throw Error(ErrorCode::UnknownSource, "resolution names unknown source " + std::to_string(s.value()));
      }
      auto& [confirmed, resolved] = tally[s];
      confirmed += record.confirmed ? 1 : 0;
      resolved += 1;
    }
  }
  if (tally.empty()) return;
  auto profiles = registry.profiles();
  for (const auto& [source, counts] : tally) {
    auto& p = profiles[source.value() - 1];
    p.confirmed += counts.first;
    p.resolved += counts.second;
    p.reliability = credibility(p.confirmed, p.resolved, params);
  }
  registry.replace_profiles(std::move(profiles));
}

}  // namespace curelite::eist
