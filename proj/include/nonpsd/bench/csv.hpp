#pragma once

// CSV tables with fixed formatting: 17 significant digits, '.' decimal point,
// '\n' line ends, comma separators, mandatory header row.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nonpsd::bench {

std::string format_number(double v);
std::string format_int(std::int64_t v);

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Throws InvalidInput when the width differs from the header.
  void add_row(std::vector<std::string> row);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t column_index(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
  std::vector<std::string> text_column(const std::string& name) const;

  std::string to_string() const;
  /// Throws Parse on ragged rows or a missing header.
  static CsvTable parse(std::string_view text, const std::string& source = "<csv>");
  static CsvTable load(const std::string& path);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes bytes exactly; throws Io.
void write_file(const std::string& path, const std::string& contents);

}  // namespace nonpsd::bench
