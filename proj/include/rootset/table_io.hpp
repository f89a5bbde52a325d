#pragma once

// Cayley table text format:
//   line 1      n
//   line 2      n whitespace-separated element names
//   lines 3..   n rows of n whitespace-separated 0-based indices, table[i][j] = i*j
// Lines starting with '#' are comments. Blank lines are skipped on input.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rootset/group_table.hpp"

namespace rootset {

inline FiniteGroupTable read_table(std::istream& in, const TableOptions& opts = {}) {
  std::vector<std::string> lines;
  std::vector<std::size_t> line_numbers;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
    line_numbers.push_back(no);
  }
  auto fail = [&](std::size_t idx, const std::string& msg) -> Error {
    const std::size_t no = idx < line_numbers.size() ? line_numbers[idx] : line_numbers.empty() ? 0 : line_numbers.back();
    return Error(Errc::parse_error, "line " + std::to_string(no) + ": " + msg);
  };
  if (lines.empty()) throw Error(Errc::parse_error, "empty table file");

  std::istringstream head(lines[0]);
  long long n = 0;
  std::string extra;
  if (!(head >> n) || n < 1 || (head >> extra)) throw fail(0, "expected a positive element count");
  const auto order = static_cast<std::size_t>(n);
  if (lines.size() != order + 2)
    throw fail(lines.size() - 1, "expected " + std::to_string(order + 2) + " content lines, found " +
                                     std::to_string(lines.size()));

  std::vector<std::string> names;
  {
    std::istringstream ns(lines[1]);
    for (std::string tok; ns >> tok;) names.push_back(tok);
    if (names.size() != order) throw fail(1, "expected " + std::to_string(order) + " names");
  }
  std::vector<std::uint32_t> table;
  table.reserve(order * order);
  for (std::size_t r = 0; r < order; ++r) {
    std::istringstream rs(lines[r + 2]);
    std::size_t count = 0;
    for (std::string tok; rs >> tok; ++count) {
      std::size_t pos = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != tok.size() || tok.empty() || tok[0] == '-') throw fail(r + 2, "bad index '" + tok + "'");
      table.push_back(static_cast<std::uint32_t>(v));
    }
    if (count != order) throw fail(r + 2, "row has " + std::to_string(count) + " entries");
  }
  return FiniteGroupTable(std::move(names), std::move(table), opts);
}

inline FiniteGroupTable read_table_file(const std::string& path, const TableOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open table file '" + path + "'");
  return read_table(in, opts);
}

/// Canonical output: single spaces, '\n' line ends, no comments.
inline void write_table(std::ostream& out, const FiniteGroupTable& g) {
  const std::size_t n = g.order();
  out << n << '\n';
  for (std::size_t i = 0; i < n; ++i) out << (i ? " " : "") << g.names()[i];
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? " " : "") << g.raw()[i * n + j];
    out << '\n';
  }
}

inline std::string to_table_text(const FiniteGroupTable& g) {
  std::ostringstream os;
  write_table(os, g);
  return os.str();
}

}  // namespace rootset
