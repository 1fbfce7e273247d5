#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dqbench/core.hpp"

namespace dqbench::csv {

struct Field {
  std::string value;
  bool quoted = false;
};

using Row = std::vector<Field>;

// RFC-4180 flavoured reader: quoted fields may contain delimiters, doubled
// quotes and line breaks; rows end at LF or CRLF. Keeps quotedness so the
// caller can distinguish a literal "?" from a bare missing marker.
inline std::vector<Row> read(std::string_view text, char delimiter = ',') {
  std::vector<Row> rows;
  Row row;
  Field field;
  bool in_quotes = false;
  bool row_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field = Field{};
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row = Row{};
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.value += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.value += c;
      }
      continue;
    }
    if (c == '"') {
      if (!field.value.empty())
        throw ParseError("line " + std::to_string(line) +
                         ": quote inside unquoted field");
      in_quotes = true;
      field.quoted = true;
      row_started = true;
    } else if (c == delimiter) {
      end_field();
      row_started = true;
    } else if (c == '\r') {
      // swallowed; the LF (if any) terminates the row
    } else if (c == '\n') {
      if (row_started || !field.value.empty()) end_row();
      ++line;
    } else {
      field.value += c;
      row_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field at end of input");
  if (row_started || !field.value.empty()) end_row();
  return rows;
}

inline bool needs_quoting(std::string_view value, char delimiter) {
  if (value.empty()) return false;
  for (char c : value)
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') return true;
  return false;
}

inline void write_field(std::string& out, std::string_view value, bool force_quote,
                        char delimiter = ',') {
  if (force_quote || needs_quoting(value, delimiter)) {
    out += '"';
    for (char c : value) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  } else {
    out.append(value);
  }
}

}  // namespace dqbench::csv
