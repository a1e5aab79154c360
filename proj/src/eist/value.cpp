#include "curelite/eist/value.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace curelite::eist {

std::string_view to_string(BaseType type) {
  switch (type) {
    case BaseType::String: return "STRING";
    case BaseType::Date: return "DATE";
    case BaseType::Number: return "NUMBER";
  }
  return "STRING";
}

std::optional<BaseType> parse_base_type(std::string_view text) {
  std::string upper(text);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "STRING") return BaseType::String;
  if (upper == "DATE") return BaseType::Date;
  if (upper == "NUMBER") return BaseType::Number;
  return std::nullopt;
}

namespace {

std::optional<int> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

bool valid_date(int y, int m, int d) {
  static constexpr int kDays[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (y < 1 || y > 9999 || m < 1 || m > 12 || d < 1) return false;
  if (d > kDays[m - 1]) return false;
  if (m == 2 && d == 29) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap;
  }
  return true;
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  char sep = text.find('-') != std::string_view::npos ? '-' : '/';
  size_t start = 0;
  while (true) {
    size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 3) return std::nullopt;
  std::optional<int> y, m, d;
  if (sep == '-') {
    y = parse_int(parts[0]);
    m = parse_int(parts[1]);
    d = parse_int(parts[2]);
  } else {
    m = parse_int(parts[0]);
    d = parse_int(parts[1]);
    y = parse_int(parts[2]);
  }
  if (!y || !m || !d || !valid_date(*y, *m, *d)) return std::nullopt;
  return Date{*y, *m, *d};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string format_number(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, ptr);
}

std::string render_value(const Value& v) {
  struct Visitor {
    std::string operator()(const CNull&) const { return "CNULL"; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const Date& d) const { return d.to_string(); }
  };
  return std::visit(Visitor{}, v);
}

std::optional<Value> parse_value(std::string_view text, BaseType type) {
  switch (type) {
    case BaseType::String:
      return Value{std::string(text)};
    case BaseType::Number: {
      double d = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
      if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
      return Value{d};
    }
    case BaseType::Date: {
      auto d = Date::parse(text);
      if (!d) return std::nullopt;
      return Value{*d};
    }
  }
  return std::nullopt;
}

}  // namespace curelite::eist
