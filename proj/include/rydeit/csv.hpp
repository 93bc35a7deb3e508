#pragma once

#include <string>
#include <vector>

namespace rydeit::csv {

/// %.17g, the round-trip representation of a double.
std::string format_double(double x);

class Table {
public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<double>& values);
  std::string str() const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

struct ParsedTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column, or -1.
  int column(const std::string& name) const;
};

/// Numeric CSV with a header row. Blank lines and lines starting with '#'
/// are skipped. Throws UsageError on malformed input.
ParsedTable parse(const std::string& text);

}  // namespace rydeit::csv
