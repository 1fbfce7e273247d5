#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dqbench/core.hpp"
#include "dqbench/csv.hpp"
#include "dqbench/expr.hpp"

namespace dqbench::io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return std::move(buf).str();
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

// Date formats use %Y (4-digit year), %y (2-digit year, 1900-based),
// %m (month), %d (day); everything else matches literally.
inline std::optional<Date> parse_date(std::string_view token, const std::string& format) {
  Date d;
  std::size_t ti = 0;
  auto digits = [&](int min_len, int max_len) -> std::optional<int> {
    int len = 0, value = 0;
    while (ti < token.size() && len < max_len && token[ti] >= '0' && token[ti] <= '9') {
      value = value * 10 + (token[ti] - '0');
      ++ti;
      ++len;
    }
    if (len < min_len) return std::nullopt;
    return value;
  };
  for (std::size_t fi = 0; fi < format.size(); ++fi) {
    char f = format[fi];
    if (f == '%' && fi + 1 < format.size()) {
      char code = format[++fi];
      std::optional<int> v;
      switch (code) {
        case 'Y': v = digits(4, 4); if (v) d.year = *v; break;
        case 'y': v = digits(2, 2); if (v) d.year = 1900 + *v; break;
        case 'm': v = digits(1, 2); if (v) d.month = *v; break;
        case 'd': v = digits(1, 2); if (v) d.day = *v; break;
        case '%':
          if (ti < token.size() && token[ti] == '%') { ++ti; v = 0; }
          break;
        default:
          throw ConfigError(std::string("unsupported date format directive '%") +
                            code + "'");
      }
      if (!v) return std::nullopt;
    } else {
      if (ti >= token.size() || token[ti] != f) return std::nullopt;
      ++ti;
    }
  }
  if (ti != token.size()) return std::nullopt;
  if (d.year == 0) return std::nullopt;
  if (d.month < 0 || d.month > 12 || d.day < 0 || d.day > 31) return std::nullopt;
  return d;
}

inline std::string render_date(const Date& d, const std::string& format) {
  if (format.empty()) return format_date(d);
  std::string out;
  auto pad = [](int v, int width) {
    std::string s = std::to_string(v);
    while (s.size() < static_cast<std::size_t>(width)) s.insert(s.begin(), '0');
    return s;
  };
  for (std::size_t fi = 0; fi < format.size(); ++fi) {
    char f = format[fi];
    if (f == '%' && fi + 1 < format.size()) {
      char code = format[++fi];
      switch (code) {
        case 'Y': out += pad(d.year, 4); break;
        case 'y': out += pad(d.year % 100, 2); break;
        case 'm': out += pad(d.month, 2); break;
        case 'd': out += pad(d.day, 2); break;
        case '%': out += '%'; break;
        default:
          throw ConfigError(std::string("unsupported date format directive '%") +
                            code + "'");
      }
    } else {
      out += f;
    }
  }
  return out;
}

struct CsvOptions {
  char delimiter = ',';
  std::vector<std::string> missing_markers{"?"};  // matched on unquoted tokens
};

namespace detail {

inline bool marker_match(std::string_view trimmed,
                         const std::vector<std::string>& markers) {
  for (const auto& m : markers)
    if (trimmed == m) return true;
  return false;
}

inline Cell build_cell(const csv::Field& field, const AttributeSpec& spec,
                       const std::vector<std::string>& default_markers,
                       std::size_t record_1based, std::size_t* format_misses) {
  std::string trimmed = trim(field.value);
  if (!field.quoted) {
    const auto& markers =
        spec.missing_markers.empty() ? default_markers : spec.missing_markers;
    if (trimmed.empty() || marker_match(trimmed, markers)) return Cell{};
  }
  switch (spec.kind) {
    case AttributeKind::numeric: {
      auto v = parse_number(trimmed);
      if (!v)
        throw ParseError("record " + std::to_string(record_1based) + ", attribute '" +
                         spec.name + "': '" + trimmed + "' is not numeric");
      return Cell{*v};
    }
    case AttributeKind::date: {
      if (!spec.date_format.empty()) {
        if (auto d = parse_date(trimmed, spec.date_format)) return Cell{*d};
      }
      if (format_misses) ++*format_misses;
      return Cell{trimmed};  // kept raw so mixtures stay auditable
    }
    case AttributeKind::categorical:
    case AttributeKind::text:
      return Cell{field.quoted ? field.value : trimmed};
  }
  throw InternalError("unreachable attribute kind");
}

}  // namespace detail

// Parses delimiter-separated text with a header row. Attributes named in
// `schema` take their declared kind/role/markers/format; the rest get their
// kind inferred from raw tokens (all-numeric => numeric, else categorical;
// an entirely missing column defaults to numeric).
inline Dataset parse_csv(std::string_view text, const std::string& name,
                         const std::vector<AttributeSpec>& schema = {},
                         std::vector<std::string>* warnings = nullptr,
                         const CsvOptions& options = {}) {
  auto rows = csv::read(text, options.delimiter);
  if (rows.empty()) throw ParseError("empty input: no header row");

  Dataset ds;
  ds.name = name;
  ds.source_digest = hex64(fnv1a64(text));

  std::set<std::string> seen;
  for (const auto& field : rows[0]) {
    std::string header = trim(field.value);
    if (header.empty()) throw ParseError("empty attribute name in header");
    if (!seen.insert(header).second)
      throw ParseError("duplicate attribute name '" + header + "' in header");
    AttributeSpec spec;
    spec.name = header;
    ds.attributes.push_back(std::move(spec));
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != ds.attributes.size())
      throw ParseError("record " + std::to_string(r) + " has " +
                       std::to_string(rows[r].size()) + " fields, expected " +
                       std::to_string(ds.attributes.size()));
  }

  std::vector<bool> declared(ds.attributes.size(), false);
  std::set<std::string> matched;
  for (const auto& given : schema) {
    if (auto idx = ds.attribute_index(given.name)) {
      AttributeSpec spec = given;
      ds.attributes[*idx] = std::move(spec);
      declared[*idx] = true;
      matched.insert(given.name);
    } else if (warnings) {
      warnings->push_back("schema attribute '" + given.name +
                          "' does not appear in the data");
    }
  }

  // Kind inference happens on raw tokens, before any missing policy runs,
  // so marker tokens like "0" or "-1" still count as numeric evidence.
  for (std::size_t c = 0; c < ds.attributes.size(); ++c) {
    if (declared[c]) continue;
    bool all_numeric = true;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& f = rows[r][c];
      std::string trimmed = trim(f.value);
      if (!f.quoted &&
          (trimmed.empty() || detail::marker_match(trimmed, options.missing_markers)))
        continue;
      if (!parse_number(trimmed)) {
        all_numeric = false;
        break;
      }
    }
    ds.attributes[c].kind = all_numeric ? AttributeKind::numeric
                                        : AttributeKind::categorical;
  }

  std::vector<std::size_t> format_misses(ds.attributes.size(), 0);
  ds.records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::vector<Cell> record;
    record.reserve(ds.attributes.size());
    for (std::size_t c = 0; c < ds.attributes.size(); ++c)
      record.push_back(detail::build_cell(rows[r][c], ds.attributes[c],
                                          options.missing_markers, r,
                                          &format_misses[c]));
    ds.records.push_back(std::move(record));
  }

  if (warnings) {
    for (std::size_t c = 0; c < ds.attributes.size(); ++c) {
      if (ds.attributes[c].kind == AttributeKind::date &&
          ds.attributes[c].date_format.empty())
        warnings->push_back("attribute '" + ds.attributes[c].name +
                            "' is declared date but has no date format; values "
                            "kept as text");
      else if (format_misses[c] > 0)
        warnings->push_back("attribute '" + ds.attributes[c].name + "': " +
                            std::to_string(format_misses[c]) +
                            " value(s) did not match the declared date format");
    }
  }
  return ds;
}

inline Dataset parse_csv_file(const std::filesystem::path& path,
                              const std::vector<AttributeSpec>& schema = {},
                              std::vector<std::string>* warnings = nullptr,
                              const CsvOptions& options = {}) {
  return parse_csv(read_file(path), path.stem().string(), schema, warnings, options);
}

// ARFF reader: @relation/@attribute/@data, '%' comment lines, '?' missing,
// nominal domains validated against the declaration. Java-style date
// patterns (yyyy-MM-dd) are converted to this library's %-directives.
inline Dataset parse_arff(std::string_view text, const std::string& fallback_name,
                          std::vector<std::string>* warnings = nullptr) {
  Dataset ds;
  ds.name = fallback_name;
  ds.source_digest = hex64(fnv1a64(text));

  std::vector<std::vector<std::string>> levels;  // per categorical attribute
  bool in_data = false;
  std::size_t line_no = 0;
  std::size_t record_no = 0;

  auto unquote = [](std::string s) {
    s = trim(s);
    if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') ||
                          (s.front() == '"' && s.back() == '"')))
      return s.substr(1, s.size() - 2);
    return s;
  };
  auto java_date_format = [](std::string fmt) {
    std::string out;
    for (std::size_t i = 0; i < fmt.size();) {
      auto run = [&](char c) {
        std::size_t n = 0;
        while (i + n < fmt.size() && fmt[i + n] == c) ++n;
        return n;
      };
      char c = fmt[i];
      if (c == 'y') {
        std::size_t n = run('y');
        out += (n >= 4) ? "%Y" : "%y";
        i += n;
      } else if (c == 'M') {
        i += run('M');
        out += "%m";
      } else if (c == 'd') {
        i += run('d');
        out += "%d";
      } else if (c == '%') {
        out += "%%";
        ++i;
      } else {
        out += c;
        ++i;
      }
    }
    return out;
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    std::string_view line = trim_view(raw);
    if (line.empty() || line.front() == '%') continue;

    if (!in_data && (line.front() == '@')) {
      std::string lower = to_lower(line);
      if (lower.rfind("@relation", 0) == 0) {
        ds.name = unquote(std::string(line.substr(9)));
        if (ds.name.empty()) ds.name = fallback_name;
      } else if (lower.rfind("@attribute", 0) == 0) {
        std::string rest = trim(line.substr(10));
        if (rest.empty())
          throw ParseError("line " + std::to_string(line_no) +
                           ": @attribute needs a name and a type");
        std::string name;
        std::size_t type_pos = 0;
        if (rest.front() == '\'' || rest.front() == '"') {
          char q = rest.front();
          auto end = rest.find(q, 1);
          if (end == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": unterminated attribute name");
          name = rest.substr(1, end - 1);
          type_pos = end + 1;
        } else {
          auto end = rest.find_first_of(" \t");
          if (end == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": @attribute needs a type");
          name = rest.substr(0, end);
          type_pos = end;
        }
        std::string type = trim(rest.substr(type_pos));
        if (type.empty())
          throw ParseError("line " + std::to_string(line_no) +
                           ": @attribute needs a type");
        AttributeSpec spec;
        spec.name = name;
        std::string type_lower = to_lower(type);
        if (type.front() == '{') {
          if (type.back() != '}')
            throw ParseError("line " + std::to_string(line_no) +
                             ": unterminated nominal domain");
          spec.kind = AttributeKind::categorical;
          std::vector<std::string> lv;
          std::string inner = type.substr(1, type.size() - 2);
          std::string current;
          bool quoted = false;
          char quote_char = 0;
          for (char c : inner) {
            if (quoted) {
              if (c == quote_char) quoted = false;
              else current += c;
            } else if (c == '\'' || c == '"') {
              quoted = true;
              quote_char = c;
            } else if (c == ',') {
              lv.push_back(trim(current));
              current.clear();
            } else {
              current += c;
            }
          }
          lv.push_back(trim(current));
          levels.resize(ds.attributes.size());
          levels.push_back(std::move(lv));
        } else if (type_lower == "numeric" || type_lower == "real" ||
                   type_lower == "integer") {
          spec.kind = AttributeKind::numeric;
        } else if (type_lower == "string") {
          spec.kind = AttributeKind::text;
        } else if (type_lower.rfind("date", 0) == 0) {
          spec.kind = AttributeKind::date;
          std::string fmt = trim(type.substr(4));
          if (!fmt.empty()) spec.date_format = java_date_format(unquote(fmt));
        } else {
          throw ParseError("line " + std::to_string(line_no) +
                           ": unsupported attribute type '" + type + "'");
        }
        ds.attributes.push_back(std::move(spec));
        levels.resize(ds.attributes.size());
      } else if (lower.rfind("@data", 0) == 0) {
        if (ds.attributes.empty())
          throw ParseError("line " + std::to_string(line_no) +
                           ": @data before any @attribute");
        in_data = true;
      } else {
        throw ParseError("line " + std::to_string(line_no) +
                         ": unknown declaration '" + std::string(line) + "'");
      }
      continue;
    }

    if (!in_data)
      throw ParseError("line " + std::to_string(line_no) +
                       ": data before @data section");
    if (line.front() == '{')
      throw ParseError("line " + std::to_string(line_no) +
                       ": sparse ARFF rows are not supported");

    // ARFF quotes with single or double quotes; split preserving both.
    std::vector<std::string> tokens;
    {
      std::string current;
      bool quoted = false;
      char quote_char = 0;
      for (char c : std::string(line)) {
        if (quoted) {
          if (c == quote_char) quoted = false;
          else current += c;
        } else if (c == '\'' || c == '"') {
          quoted = true;
          quote_char = c;
        } else if (c == ',') {
          tokens.push_back(current);
          current.clear();
        } else {
          current += c;
        }
      }
      if (quoted)
        throw ParseError("line " + std::to_string(line_no) +
                         ": unterminated quoted value");
      tokens.push_back(current);
    }
    ++record_no;
    if (tokens.size() != ds.attributes.size())
      throw ParseError("record " + std::to_string(record_no) + " (line " +
                       std::to_string(line_no) + ") has " +
                       std::to_string(tokens.size()) + " values, expected " +
                       std::to_string(ds.attributes.size()));
    std::vector<Cell> record;
    record.reserve(tokens.size());
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      std::string token = trim(tokens[c]);
      const AttributeSpec& spec = ds.attributes[c];
      if (token == "?") {
        record.emplace_back();
        continue;
      }
      switch (spec.kind) {
        case AttributeKind::numeric: {
          auto v = parse_number(token);
          if (!v)
            throw ParseError("record " + std::to_string(record_no) +
                             ", attribute '" + spec.name + "': '" + token +
                             "' is not numeric");
          record.emplace_back(*v);
          break;
        }
        case AttributeKind::categorical: {
          const auto& lv = levels[c];
          if (!lv.empty() && std::find(lv.begin(), lv.end(), token) == lv.end())
            throw ParseError("record " + std::to_string(record_no) +
                             ", attribute '" + spec.name + "': value '" + token +
                             "' is outside the declared domain");
          record.emplace_back(token);
          break;
        }
        case AttributeKind::date: {
          if (!spec.date_format.empty()) {
            if (auto d = parse_date(token, spec.date_format)) {
              record.emplace_back(*d);
              break;
            }
          }
          record.emplace_back(token);
          break;
        }
        case AttributeKind::text:
          record.emplace_back(token);
          break;
      }
    }
    ds.records.push_back(std::move(record));
  }
  if (!in_data) throw ParseError("missing @data section");
  if (warnings) {
    for (const auto& a : ds.attributes)
      if (a.kind == AttributeKind::date && a.date_format.empty())
        warnings->push_back("attribute '" + a.name +
                            "' is declared date but has no date format; values "
                            "kept as text");
  }
  return ds;
}

inline Dataset parse_arff_file(const std::filesystem::path& path,
                               std::vector<std::string>* warnings = nullptr) {
  return parse_arff(read_file(path), path.stem().string(), warnings);
}

// Canonical CSV rendering: missing cells are bare '?', numbers print with
// shortest round-trip form, dates with their declared format, and text is
// quoted whenever it would otherwise read back differently.
inline std::string serialize_csv(const Dataset& ds, char delimiter = ',') {
  std::string out;
  for (std::size_t c = 0; c < ds.attributes.size(); ++c) {
    if (c) out += delimiter;
    csv::write_field(out, ds.attributes[c].name, false, delimiter);
  }
  out += '\n';
  for (const auto& record : ds.records) {
    invariant(record.size() == ds.attributes.size(),
              "record width matches attribute count");
    for (std::size_t c = 0; c < record.size(); ++c) {
      if (c) out += delimiter;
      const Cell& cell = record[c];
      const AttributeSpec& spec = ds.attributes[c];
      if (is_missing(cell)) {
        out += '?';
        continue;
      }
      if (is_number(cell)) {
        out += format_number(as_number(cell));
        continue;
      }
      if (is_date(cell)) {
        out += render_date(as_date(cell), spec.date_format);
        continue;
      }
      const std::string& text = as_text(cell);
      const auto& markers = spec.missing_markers.empty()
                                ? std::vector<std::string>{"?"}
                                : spec.missing_markers;
      bool force_quote = text.empty() || trim(text) != text ||
                         detail::marker_match(text, markers);
      csv::write_field(out, text, force_quote, delimiter);
    }
    out += '\n';
  }
  return out;
}

struct MissingPolicy {
  // attribute name -> marker tokens replaced by missing
  std::vector<std::pair<std::string, std::vector<std::string>>> rules;
};

struct PolicyResult {
  Dataset dataset;
  std::vector<std::pair<std::string, std::size_t>> replaced;  // per attribute
};

// Replaces cells whose canonical token exactly matches a declared marker
// (after trimming) with missing. Idempotent: already-missing cells never
// match, and replaced cells cannot match again.
inline PolicyResult apply_missing_policy(const Dataset& ds, const MissingPolicy& policy) {
  PolicyResult result{ds, {}};
  for (const auto& [attr, markers] : policy.rules) {
    auto maybe_idx = ds.attribute_index(attr);
    if (!maybe_idx)
      throw ConfigError("missing-value policy names unknown attribute '" + attr + "'");
    std::size_t idx = *maybe_idx;
    std::size_t count = 0;
    for (auto& record : result.dataset.records) {
      Cell& cell = record[idx];
      if (is_missing(cell)) continue;
      if (detail::marker_match(trim(cell_token(cell)), markers)) {
        cell = Cell{};
        ++count;
      }
    }
    result.replaced.emplace_back(attr, count);
  }
  return result;
}

struct FilterResult {
  Dataset dataset;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

// keep=true retains matching records; keep=false drops them.
inline FilterResult filter_records(const Dataset& ds, const std::string& predicate,
                                   bool keep = true) {
  auto pred = expr::Predicate::parse(predicate);
  pred.bind_check(ds);
  FilterResult result;
  result.dataset.name = ds.name;
  result.dataset.attributes = ds.attributes;
  result.dataset.source_digest = ds.source_digest;
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    bool match = pred.evaluate(ds, r);
    if (match == keep) {
      result.dataset.records.push_back(ds.records[r]);
      ++result.kept;
    } else {
      ++result.dropped;
    }
  }
  return result;
}

struct AttributeSummary {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  AttributeRole role = AttributeRole::feature;
  std::string unit;
  std::size_t records = 0;
  std::size_t non_missing = 0;
  std::size_t missing = 0;
  std::size_t distinct = 0;
  std::optional<double> mean, sd, min, max;  // numeric columns only
};

inline std::vector<AttributeSummary> summarize_attributes(const Dataset& ds) {
  std::vector<AttributeSummary> out;
  out.reserve(ds.attributes.size());
  for (std::size_t c = 0; c < ds.attributes.size(); ++c) {
    const AttributeSpec& spec = ds.attributes[c];
    AttributeSummary s;
    s.name = spec.name;
    s.kind = spec.kind;
    s.role = spec.role;
    s.unit = spec.unit;
    s.records = ds.records.size();
    std::set<std::string> distinct;
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (const auto& record : ds.records) {
      const Cell& cell = record[c];
      if (is_missing(cell)) {
        ++s.missing;
        continue;
      }
      ++s.non_missing;
      distinct.insert(cell_token(cell));
      if (is_number(cell)) {
        double x = as_number(cell);
        ++n;
        double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
        s.min = s.min ? std::min(*s.min, x) : x;
        s.max = s.max ? std::max(*s.max, x) : x;
      }
    }
    s.distinct = distinct.size();
    if (n > 0) s.mean = mean;
    if (n > 1) s.sd = std::sqrt(m2 / static_cast<double>(n - 1));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace dqbench::io
