#include "curelite/eist/lineage_text.hpp"

#include <charconv>

#include "curelite/common/error.hpp"

namespace curelite::eist {

std::string encode_vector(const Lineage& lineage, std::size_t n) {
  if (lineage.is_fact()) return "T";
  if (!lineage.is_base_form()) {
    throw Error(ErrorCode::NonBaseLineage, "derived lineage " + to_dnf_text(lineage) + " has no bit-vector form");
  }
  std::string bits(n, '0');
  for (const auto& conjunct : lineage.conjuncts()) {
    const auto ordinal = conjunct[0].value();
    if (ordinal == 0 || ordinal > n) {
      throw Error(ErrorCode::UnknownSource, "source ordinal " + std::to_string(ordinal) + " outside vector width");
    }
    bits[ordinal - 1] = '1';
  }
  return bits;
}

Lineage decode_vector(std::string_view text, std::size_t n) {
  if (text == "T") return Lineage::fact();
  if (text.size() != n && text.size() != n + 1) {
    throw Error(ErrorCode::MalformedVector, "vector '" + std::string(text) + "' must have " + std::to_string(n) +
                                                " or " + std::to_string(n + 1) + " bits");
  }
  std::vector<Lineage::Conjunct> conjuncts;
  for (std::size_t i = 0; i < n; ++i) {
    if (text[i] == '1') {
      conjuncts.push_back({SourceId(static_cast<std::uint32_t>(i + 1))});
    } else if (text[i] != '0') {
      throw Error(ErrorCode::MalformedVector, "vector '" + std::string(text) + "' contains a non-bit character");
    }
  }
  if (text.size() == n + 1) {
    const char last = text[n];
    if (last != '0' && last != '1') {
      throw Error(ErrorCode::MalformedVector, "vector '" + std::string(text) + "' contains a non-bit character");
    }
    if (last == '1') {
      if (!conjuncts.empty()) {
        throw Error(ErrorCode::MalformedVector, "when the T bit is set every other bit must be zero");
      }
      return Lineage::fact();
    }
  }
  if (conjuncts.empty()) throw Error(ErrorCode::MalformedVector, "vector has no contributing source");
  return Lineage::from_conjuncts(std::move(conjuncts));
}

std::string render_provenance(const Lineage& lineage, const std::function<std::string(SourceId)>& name_of) {
  std::string out;
  bool first_conjunct = true;
  for (const auto& conjunct : lineage.conjuncts()) {
    if (!first_conjunct) out += '|';
    first_conjunct = false;
    out += '(';
    for (std::size_t i = 0; i < conjunct.size(); ++i) {
      if (i) out += '&';
      out += conjunct[i].is_truth() ? std::string("T") : name_of(conjunct[i]);
    }
    out += ')';
  }
  return out;
}

std::string to_dnf_text(const Lineage& lineage) {
  return render_provenance(lineage, [](SourceId s) { return "s" + std::to_string(s.value()); });
}

Lineage parse_dnf_text(std::string_view text) {
  auto malformed = [&](const std::string& why) {
    return Error(ErrorCode::MalformedVector, "lineage '" + std::string(text) + "': " + why);
  };
  std::vector<Lineage::Conjunct> conjuncts;
  std::size_t pos = 0;
  while (true) {
    if (pos >= text.size() || text[pos] != '(') throw malformed("expected '('");
    ++pos;
    Lineage::Conjunct conjunct;
    while (true) {
      if (pos < text.size() && text[pos] == 'T') {
        conjunct.push_back(SourceId::truth());
        ++pos;
      } else if (pos < text.size() && text[pos] == 's') {
        ++pos;
        std::uint32_t ordinal = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), ordinal);
        if (ec != std::errc() || ordinal == 0) throw malformed("bad source ordinal");
        pos = static_cast<std::size_t>(ptr - text.data());
        conjunct.push_back(SourceId(ordinal));
      } else {
        throw malformed("expected a source");
      }
      if (pos < text.size() && text[pos] == '&') {
        ++pos;
        continue;
      }
      break;
    }
    if (pos >= text.size() || text[pos] != ')') throw malformed("expected ')'");
    ++pos;
    conjuncts.push_back(std::move(conjunct));
    if (pos == text.size()) break;
    if (text[pos] != '|') throw malformed("expected '|'");
    ++pos;
  }
  return Lineage::from_conjuncts(std::move(conjuncts));
}

std::string to_storage_text(const Lineage& lineage, std::size_t n) {
  if (lineage.is_fact() || lineage.is_base_form()) return encode_vector(lineage, n);
  return to_dnf_text(lineage);
}

Lineage parse_storage_text(std::string_view text, std::size_t n) {
  if (!text.empty() && text[0] == '(') return parse_dnf_text(text);
  return decode_vector(text, n);
}

}  // namespace curelite::eist
