#include "curelite/eist/source.hpp"

#include "curelite/common/error.hpp"

namespace curelite::eist {

namespace {

const SourceProfile& truth_profile() {
  static const SourceProfile kTruth{SourceId::truth(), {"T"}, SourceKind::Curator, 1.0, 0, 0, std::nullopt};
  return kTruth;
}

void check_reliability(double value) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::InvalidReliability, "reliability must lie in (0,1], got " + std::to_string(value));
  }
}

}  // namespace

ReliabilityLookup lookup_from(const Reliabilities& table) {
  return [&table](SourceId id) -> std::optional<double> {
    if (id.is_truth()) return 1.0;
    auto it = table.find(id);
    if (it == table.end()) return std::nullopt;
    return it->second;
  };
}

std::string join_key(const std::vector<std::string>& key_values) {
  std::string out;
  for (std::size_t i = 0; i < key_values.size(); ++i) {
    if (i) out += ',';
    out += key_values[i];
  }
  return out;
}

SourceId SourceRegistry::register_source(std::vector<std::string> key_values, SourceKind kind,
                                         std::optional<double> initial_reliability) {
  if (key_values.empty()) throw Error(ErrorCode::InvalidArgument, "source identity must be nonempty");
  if (key_values.size() == 1 && key_values[0] == "T") {
    throw Error(ErrorCode::InvalidArgument, "identity 'T' is reserved for the system source");
  }
  if (auto existing = find(key_values)) return *existing;
  if (initial_reliability) check_reliability(*initial_reliability);
  SourceProfile profile;
  profile.source = SourceId(static_cast<std::uint32_t>(profiles_.size() + 1));
  profile.key_values = std::move(key_values);
  profile.kind = kind;
  profile.reliability = initial_reliability.value_or(0.5);
  profiles_.push_back(std::move(profile));
  return profiles_.back().source;
}

std::optional<SourceId> SourceRegistry::find(const std::vector<std::string>& key_values) const {
  for (const auto& p : profiles_) {
    if (p.key_values == key_values) return p.source;
  }
  return std::nullopt;
}

std::optional<SourceId> SourceRegistry::find_by_name(std::string_view name) const {
  if (name == "T") return SourceId::truth();
  for (const auto& p : profiles_) {
    if (join_key(p.key_values) == name) return p.source;
  }
  return std::nullopt;
}

bool SourceRegistry::contains(SourceId id) const {
  return id.is_truth() || (id.value() >= 1 && id.value() <= profiles_.size());
}

std::uint32_t SourceRegistry::ordinal(SourceId id) const {
  if (id.is_truth()) return static_cast<std::uint32_t>(profiles_.size() + 1);
  if (!contains(id)) throw Error(ErrorCode::UnknownSource, "unknown source id " + std::to_string(id.value()));
  return id.value();
}

SourceId SourceRegistry::from_ordinal(std::uint32_t ordinal) const {
  if (ordinal == profiles_.size() + 1) return SourceId::truth();
  if (ordinal == 0 || ordinal > profiles_.size()) {
    throw Error(ErrorCode::UnknownSource, "no source with ordinal " + std::to_string(ordinal));
  }
  return SourceId(ordinal);
}

const SourceProfile& SourceRegistry::profile(SourceId id) const {
  if (id.is_truth()) return truth_profile();
  if (!contains(id)) throw Error(ErrorCode::UnknownSource, "unknown source id " + std::to_string(id.value()));
  return profiles_[id.value() - 1];
}

std::string SourceRegistry::display_name(SourceId id) const { return join_key(profile(id).key_values); }

void SourceRegistry::set_override(SourceId id, std::optional<double> value) {
  if (id.is_truth()) throw Error(ErrorCode::InvalidArgument, "the reliability of T is fixed at 1.0");
  if (!contains(id)) throw Error(ErrorCode::UnknownSource, "unknown source id " + std::to_string(id.value()));
  if (value) check_reliability(*value);
  profiles_[id.value() - 1].overridden = value;
}

void SourceRegistry::replace_profiles(std::vector<SourceProfile> profiles) {
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].source != SourceId(static_cast<std::uint32_t>(i + 1))) {
      throw Error(ErrorCode::InvariantViolation, "source ordinals must be contiguous from 1");
    }
    if (profiles[i].confirmed > profiles[i].resolved) {
      throw Error(ErrorCode::InvariantViolation, "confirmed count exceeds resolved count");
    }
    check_reliability(profiles[i].reliability);
    if (profiles[i].overridden) check_reliability(*profiles[i].overridden);
  }
  profiles_ = std::move(profiles);
}

double SourceRegistry::effective(SourceId id) const { return profile(id).effective(); }

Reliabilities SourceRegistry::effective_reliabilities() const {
  Reliabilities out;
  for (const auto& p : profiles_) out.emplace(p.source, p.effective());
  return out;
}

}  // namespace curelite::eist
