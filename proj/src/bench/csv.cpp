#include "nonpsd/bench/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nonpsd/bench/config.hpp"
#include "nonpsd/error.hpp"

namespace nonpsd::bench {

std::string format_number(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "csv: non-finite value");
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorCode::InvalidInput, "csv: row width " + std::to_string(row.size()) + " != header width " +
                                             std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < header_.size(); ++j) {
    if (header_[j] == name) return j;
  }
  throw Error(ErrorCode::InvalidInput, "csv: no column '" + name + "'");
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(parse_double(row[j], name));
  return out;
}

std::vector<std::string> CsvTable::text_column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row[j]);
  return out;
}

std::string CsvTable::to_string() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ',';
      out += row[j];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
  return out;
}

CsvTable CsvTable::parse(std::string_view text, const std::string& source) {
  CsvTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    while (true) {
      const std::size_t comma = line.find(',');
      fields.emplace_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (!have_header) {
      table.header_ = std::move(fields);
      have_header = true;
    } else if (fields.size() != table.header_.size()) {
      throw Error(ErrorCode::Parse, source + ":" + std::to_string(line_no) + ": ragged row");
    } else {
      table.rows_.push_back(std::move(fields));
    }
  }
  if (!have_header) throw Error(ErrorCode::Parse, source + ": missing header row");
  return table;
}

CsvTable CsvTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace nonpsd::bench
