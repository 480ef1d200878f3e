// Delimited tables and line-delimited JSON on disk.
#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "marsec/nn/checkpoint.hpp"

namespace marsec::experiment {

/// Raised when an input table lacks a required column (CLI exit code 5).
class MissingColumnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Comma-separated table with a header row. Cells never contain commas.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t index(const std::string& name, const std::string& source = "table") const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw MissingColumnError(source + " has no column '" + name + "'");
  }

  double number(std::size_t row, std::size_t col) const {
    const std::string& s = rows.at(row).at(col);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw std::runtime_error("table cell '" + s + "' is not a number");
    return v;
  }
};

inline std::string fmt(double v) { return nn::format_double(v); }

inline std::vector<std::string> fmt_row(const std::vector<double>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(fmt(x));
  return out;
}

inline void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + p.string() + "'");
  return out;
}

inline void write_table(std::ostream& os, const Table& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
}

inline void write_table(const std::filesystem::path& p, const Table& t) {
  auto out = open_out(p);
  write_table(out, t);
  if (!out) throw std::ios_base::failure("write failed for '" + p.string() + "'");
}

inline Table parse_table(std::istream& is) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw MissingColumnError("table has no header row");
  t.columns = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.columns.size())
      throw std::runtime_error("table row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(t.columns.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline Table read_table(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + p.string() + "'");
  return parse_table(in);
}

inline std::vector<nlohmann::ordered_json> read_jsonl(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + p.string() + "'");
  std::vector<nlohmann::ordered_json> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::ordered_json::parse(line));
  return out;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace marsec::experiment
