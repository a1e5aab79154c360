#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curelite::eist {

/// Opaque source handle. Ordinary sources carry their 1-based registration
/// ordinal; the always-correct system source T is a distinguished value whose
/// ordinal is n+1 and therefore depends on the registry it lives in.
class SourceId {
 public:
  constexpr SourceId() = default;
  constexpr explicit SourceId(std::uint32_t ordinal) : value_(ordinal) {}

  static constexpr SourceId truth() { return SourceId(); }

  constexpr bool is_truth() const { return value_ == 0; }
  constexpr std::uint32_t value() const { return value_; }

  auto operator<=>(const SourceId&) const = default;

 private:
  std::uint32_t value_ = 0;
};

enum class SourceKind { Curator, Extractor };

struct SourceProfile {
  SourceId source;
  std::vector<std::string> key_values;
  SourceKind kind = SourceKind::Curator;
  double reliability = 0.5;
  std::uint64_t confirmed = 0;
  std::uint64_t resolved = 0;
  std::optional<double> overridden;

  double effective() const { return overridden.value_or(reliability); }

  friend bool operator==(const SourceProfile&, const SourceProfile&) = default;
};

/// Source id to effective reliability. T is implied (always 1.0) and need not
/// be present.
using Reliabilities = std::map<SourceId, double>;

/// Lookup used by the reliability calculus; returns nullopt for unknown ids.
using ReliabilityLookup = std::function<std::optional<double>(SourceId)>;

ReliabilityLookup lookup_from(const Reliabilities& table);

/// The Curator Index: registered sources, their identities and credibility.
class SourceRegistry {
 public:
  SourceRegistry() = default;

  /// Returns the existing id when the identity is already registered.
  SourceId register_source(std::vector<std::string> key_values,
                           SourceKind kind = SourceKind::Curator,
                           std::optional<double> initial_reliability = std::nullopt);

  std::optional<SourceId> find(const std::vector<std::string>& key_values) const;
  /// Accepts either a display name (key values joined by ',') or "T".
  std::optional<SourceId> find_by_name(std::string_view name) const;

  bool contains(SourceId id) const;
  std::size_t size() const { return profiles_.size(); }

  std::uint32_t ordinal(SourceId id) const;
  SourceId from_ordinal(std::uint32_t ordinal) const;

  const SourceProfile& profile(SourceId id) const;
  const std::vector<SourceProfile>& profiles() const { return profiles_; }

  std::string display_name(SourceId id) const;

  /// Persistent user override; T can never be overridden.
  void set_override(SourceId id, std::optional<double> value);

  void replace_profiles(std::vector<SourceProfile> profiles);

  double effective(SourceId id) const;
  Reliabilities effective_reliabilities() const;

  friend bool operator==(const SourceRegistry&, const SourceRegistry&) = default;

 private:
  std::vector<SourceProfile> profiles_;
};

std::string join_key(const std::vector<std::string>& key_values);

}  // namespace curelite::eist
