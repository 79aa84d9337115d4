#pragma once

// Minimal RFC-4180 reader and writer.

#include <gatherplot/error.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gatherplot::csv {

struct Row {
  std::size_t line = 0;  // 1-based line of the row's first character
  std::vector<std::string> cells;
};

// Splits `text` into rows. Quoted fields may contain separators, CR/LF and
// doubled quotes. Blank lines are skipped. An unterminated quote is a
// structural error.
inline std::vector<Row> parse(std::string_view text, char sep = ',') {
  std::vector<Row> rows;
  Row row;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  bool row_has_content = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;
  row.line = 1;

  auto end_cell = [&] {
    row.cells.push_back(std::move(cell));
    cell.clear();
    cell_was_quoted = false;
  };
  auto end_row = [&] {
    end_cell();
    bool blank = !row_has_content && row.cells.size() == 1 && row.cells[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row = Row{};
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    if (c == '"' && cell.empty() && !cell_was_quoted) {
      in_quotes = true;
      cell_was_quoted = true;
      row_has_content = true;
      quote_line = line;
    } else if (c == sep) {
      row_has_content = true;
      end_cell();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      end_row();
      row.line = ++line;
    } else if (c == '\n') {
      end_row();
      row.line = ++line;
    } else {
      row_has_content = true;
      cell += c;
    }
  }
  if (in_quotes) {
    throw error(errc::structural,
                "unterminated quoted field starting on line " + std::to_string(quote_line));
  }
  if (row_has_content || !cell.empty()) end_row();
  return rows;
}

inline std::string quote(std::string_view cell, char sep = ',') {
  bool needs = cell.find_first_of(std::string{sep} + "\"\r\n") != std::string_view::npos ||
               (!cell.empty() && (cell.front() == ' ' || cell.back() == ' '));
  if (!needs) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void append_row(std::string& out, const std::vector<std::string>& cells, char sep = ',') {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += sep;
    out += quote(cells[i], sep);
  }
  out += '\n';
}

}  // namespace gatherplot::csv
