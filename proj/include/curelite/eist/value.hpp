#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace curelite::eist {

enum class BaseType { String, Date, Number };

std::string_view to_string(BaseType type);
std::optional<BaseType> parse_base_type(std::string_view text);

/// Crowd-null: a cell awaiting a curator-supplied value.
struct CNull {
  auto operator<=>(const CNull&) const = default;
};

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;

  /// Accepts ISO `2016-01-31` and US `1/31/2016`.
  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;
};

using Value = std::variant<CNull, double, std::string, Date>;
using Row = std::vector<Value>;

inline bool is_cnull(const Value& v) { return std::holds_alternative<CNull>(v); }

/// Display text; strings unquoted, dates ISO, numbers in shortest round-trip form.
std::string render_value(const Value& v);

/// Parses display text back into a value of the given type. `CNULL` handling is
/// left to callers since the textual marker differs between formats.
std::optional<Value> parse_value(std::string_view text, BaseType type);

std::string format_number(double d);

}  // namespace curelite::eist
