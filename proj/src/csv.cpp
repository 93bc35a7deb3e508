#include "rydeit/csv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "rydeit/errors.hpp"

namespace rydeit::csv {

std::string format_double(double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return {buf, static_cast<std::size_t>(n)};
}

void Table::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw UsageError("csv::Table: row width does not match header");
  rows_.push_back(values);
}

std::string Table::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

int ParsedTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

ParsedTable parse(const std::string& text) {
  ParsedTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cells = split(t);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw UsageError("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(table.header.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size())
        throw UsageError("csv: line " + std::to_string(line_no) + ": '" + c + "' is not a number");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw UsageError("csv: missing header row");
  return table;
}

}  // namespace rydeit::csv
