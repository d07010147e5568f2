#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fbp {

/// Shortest round-trip formatting is not used on purpose: every data file
/// prints reals with exactly 17 significant digits.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column position by name; throws Error(Io) when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Reads a numeric CSV with a header line. Blank lines and lines starting
/// with '#' are skipped. Throws Error(Io) on malformed input.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Reads a headerless or headed two-column numeric table.
std::vector<std::pair<double, double>> read_two_column_csv(const std::string& path);

void write_csv_row(std::ostream& out, const std::vector<double>& row);

}  // namespace fbp
