#pragma once

#include <cstddef>
#include <vector>

#include "curelite/eist/lineage.hpp"
#include "curelite/eist/source.hpp"

namespace curelite::eist {

enum class ReliabilityMode { Probabilistic, Fuzzy };

inline constexpr std::size_t kDefaultMaxDistinctSources = 24;

/// Exact probability that the lineage holds when each source is
/// independently correct with its reliability. Shannon expansion on the most
/// frequent source, memoized on the residual formula.
double reliability_prob(const Lineage& lineage, const ReliabilityLookup& reliabilities,
                        std::size_t max_distinct_sources = kDefaultMaxDistinctSources);

/// Max over derivations of the min reliability inside each derivation.
double reliability_fuzzy(const Lineage& lineage, const ReliabilityLookup& reliabilities);

double reliability(const Lineage& lineage, const ReliabilityLookup& reliabilities, ReliabilityMode mode);

struct ResolutionRecord;

/// Laplace-smoothed agreement ratio: (confirmed + k0*r0) / (resolved + k0).
struct CredibilityParams {
  double pseudo_count = 2.0;
  double prior = 0.5;
  double floor = 1e-6;
};

/// Folds resolution outcomes into the registry's confirmation history and
/// recomputes reliabilities of every ordinary source named by a record.
void update_reliabilities(const std::vector<ResolutionRecord>& records, SourceRegistry& registry,
                          const CredibilityParams& params = {});

double credibility(std::uint64_t confirmed, std::uint64_t resolved, const CredibilityParams& params = {});

}  // namespace curelite::eist
