#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "curelite/eist/lineage.hpp"

namespace curelite::eist {

/// Bit-vector text for base-form lineages over `n` ordinary sources: bit i
/// (1-based, left to right) set when source i contributed. {{T}} encodes as
/// "T". Throws NonBaseLineage for lineages produced by joins.
std::string encode_vector(const Lineage& lineage, std::size_t n);

/// Accepts n bits, n+1 bits (the last bit being T, set only alone), or "T".
/// Throws MalformedVector.
Lineage decode_vector(std::string_view text, std::size_t n);

/// `(s2&s3)|(s5)` using ordinals; T renders as `T`.
std::string to_dnf_text(const Lineage& lineage);
Lineage parse_dnf_text(std::string_view text);

/// Storage form: bit vector when possible, DNF otherwise.
std::string to_storage_text(const Lineage& lineage, std::size_t n);
Lineage parse_storage_text(std::string_view text, std::size_t n);

/// DNF rendering with caller-supplied source names, e.g. `(Fred)|(Karen)`.
std::string render_provenance(const Lineage& lineage, const std::function<std::string(SourceId)>& name_of);

}  // namespace curelite::eist
