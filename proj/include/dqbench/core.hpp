#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dqbench {

inline constexpr const char* version = "0.1.0";

// Error hierarchy. The CLI maps these onto process exit codes:
// UsageError and derived -> 1, IoError -> 2, InternalError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class ParseError : public UsageError {
 public:
  using UsageError::UsageError;
};

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

class ValidationError : public UsageError {
 public:
  using UsageError::UsageError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

inline void invariant(bool condition, const std::string& what) {
  if (!condition) throw InternalError("invariant violated: " + what);
}

struct Date {
  int year = 0;
  int month = 0;  // 0 when the format carries no month
  int day = 0;    // 0 when the format carries no day

  friend bool operator==(const Date&, const Date&) = default;
  friend auto operator<=>(const Date&, const Date&) = default;
};

// A cell is missing, a number, a date, or raw text (categorical/text kinds,
// or a date token that failed its declared format and is kept for auditing).
using Cell = std::variant<std::monostate, double, Date, std::string>;

inline bool is_missing(const Cell& c) {
  return std::holds_alternative<std::monostate>(c);
}
inline bool is_number(const Cell& c) { return std::holds_alternative<double>(c); }
inline bool is_date(const Cell& c) { return std::holds_alternative<Date>(c); }
inline bool is_text(const Cell& c) { return std::holds_alternative<std::string>(c); }

inline double as_number(const Cell& c) { return std::get<double>(c); }
inline const Date& as_date(const Cell& c) { return std::get<Date>(c); }
inline const std::string& as_text(const Cell& c) { return std::get<std::string>(c); }

enum class AttributeKind { numeric, categorical, date, text };
enum class AttributeRole { feature, target, identifier, derived, excluded };

inline std::string to_string(AttributeKind k) {
  switch (k) {
    case AttributeKind::numeric: return "numeric";
    case AttributeKind::categorical: return "categorical";
    case AttributeKind::date: return "date";
    case AttributeKind::text: return "text";
  }
  throw InternalError("unreachable attribute kind");
}

inline std::string to_string(AttributeRole r) {
  switch (r) {
    case AttributeRole::feature: return "feature";
    case AttributeRole::target: return "target";
    case AttributeRole::identifier: return "identifier";
    case AttributeRole::derived: return "derived";
    case AttributeRole::excluded: return "excluded";
  }
  throw InternalError("unreachable attribute role");
}

inline AttributeKind attribute_kind_from_string(std::string_view s) {
  if (s == "numeric") return AttributeKind::numeric;
  if (s == "categorical") return AttributeKind::categorical;
  if (s == "date") return AttributeKind::date;
  if (s == "text") return AttributeKind::text;
  throw ValidationError("unknown attribute kind '" + std::string(s) + "'");
}

inline AttributeRole attribute_role_from_string(std::string_view s) {
  if (s == "feature") return AttributeRole::feature;
  if (s == "target") return AttributeRole::target;
  if (s == "identifier") return AttributeRole::identifier;
  if (s == "derived") return AttributeRole::derived;
  if (s == "excluded") return AttributeRole::excluded;
  throw ValidationError("unknown attribute role '" + std::string(s) + "'");
}

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  AttributeRole role = AttributeRole::feature;
  std::string unit;                          // empty when undeclared
  std::vector<std::string> missing_markers;  // exact tokens, matched after trimming
  std::string date_format;                   // required before date values parse
  std::vector<std::string> alternate_date_formats;  // tolerated but flagged
  std::string measures;  // rubric concept this column records (size, effort, ...)

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

struct Dataset {
  std::string name;
  std::vector<AttributeSpec> attributes;
  std::vector<std::vector<Cell>> records;
  std::string source_digest;  // hex FNV-1a of the raw input bytes

  std::optional<std::size_t> attribute_index(std::string_view attr) const {
    for (std::size_t i = 0; i < attributes.size(); ++i)
      if (attributes[i].name == attr) return i;
    return std::nullopt;
  }

  std::size_t require_attribute(std::string_view attr) const {
    if (auto i = attribute_index(attr)) return *i;
    throw ValidationError("dataset '" + name + "' has no attribute named '" +
                          std::string(attr) + "'");
  }
};

inline std::string_view trim_view(std::string_view s) {
  const auto* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::string trim(std::string_view s) { return std::string(trim_view(s)); }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// Strict numeric token parse: the whole trimmed token must be a finite
// decimal number. Rejects inf/nan spellings and trailing garbage.
inline std::optional<double> parse_number(std::string_view token) {
  auto t = trim_view(token);
  if (t.empty()) return std::nullopt;
  if (t.front() == '+') t.remove_prefix(1);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

// Shortest round-trip decimal rendering, so serialize(parse(x)) is identity.
inline std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  invariant(ec == std::errc(), "number formatting");
  return std::string(buf, ptr);
}

inline double round_half_up(double value, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5) / scale;
}

// Fixed-decimal rendering after half-up rounding ("12.5", "8").
inline std::string format_fixed(double value, int decimals) {
  double r = round_half_up(value, decimals);
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), r, std::chars_format::fixed, decimals);
  invariant(ec == std::errc(), "fixed formatting");
  return std::string(buf, ptr);
}

inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::string format_date(const Date& d) {
  auto pad = [](int v, int width) {
    std::string s = std::to_string(v);
    while (s.size() < static_cast<std::size_t>(width)) s.insert(s.begin(), '0');
    return s;
  };
  std::string out = pad(d.year, 4);
  if (d.month > 0) {
    out += "-" + pad(d.month, 2);
    if (d.day > 0) out += "-" + pad(d.day, 2);
  }
  return out;
}

// Canonical token for a cell, used by serializers, hashing and equality.
inline std::string cell_token(const Cell& c, const std::string& missing_token = "?") {
  if (is_missing(c)) return missing_token;
  if (is_number(c)) return format_number(as_number(c));
  if (is_date(c)) return as_date(c).year ? format_date(as_date(c)) : std::string();
  return as_text(c);
}

}  // namespace dqbench
