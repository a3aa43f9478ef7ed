#include "nonpsd/bench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

namespace nonpsd::bench {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

double to_double(std::string_view tok, const std::string& source, std::size_t line) {
  tok = trim(tok);
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    parse_fail(source, line, "bad number '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  while (true) {
    const std::size_t at = line.find(delim);
    out.push_back(line.substr(0, at));
    if (at == std::string_view::npos) break;
    line = line.substr(at + 1);
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

Dataset parse_csv(const std::string& text, const LoadOptions& opts, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool header_pending = opts.header;
  std::string_view rest = text;
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split(line, opts.delimiter);
    if (width == 0) {
      width = fields.size();
      if (width < 2) parse_fail(source, line_no, "need at least one feature and a label");
    } else if (fields.size() != width) {
      parse_fail(source, line_no,
                 "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    const auto w = static_cast<Index>(width);
    const Index label_col = opts.label_column < 0 ? w + opts.label_column : opts.label_column;
    if (label_col < 0 || label_col >= w) parse_fail(source, line_no, "label column out of range");
    std::vector<double> row;
    row.reserve(width - 1);
    for (Index j = 0; j < w; ++j) {
      const double v = to_double(fields[static_cast<std::size_t>(j)], source, line_no);
      if (j == label_col) {
        labels.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::Parse, source + ": no data rows");
  Dataset out;
  out.a.resize(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) out.a(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  out.labels = Eigen::Map<RVec>(labels.data(), static_cast<Index>(labels.size()));
  return out;
}

Dataset parse_libsvm(const std::string& text, const LoadOptions& opts, const std::string& source) {
  struct Entry {
    Index col;
    double value;
  };
  std::vector<std::vector<Entry>> rows;
  std::vector<double> labels;
  Index max_col = 0;
  std::size_t line_no = 0;
  std::string_view rest = text;
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto tokens = split_ws(line);
    labels.push_back(to_double(tokens[0], source, line_no));
    std::vector<Entry> row;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const std::size_t colon = tokens[k].find(':');
      if (colon == std::string_view::npos) parse_fail(source, line_no, "expected index:value, got '" + std::string(tokens[k]) + "'");
      const std::string_view idx_tok = tokens[k].substr(0, colon);
      Index idx = 0;
      const auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
      if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx < 1) {
        parse_fail(source, line_no, "bad feature index '" + std::string(idx_tok) + "'");
      }
      row.push_back({idx - 1, to_double(tokens[k].substr(colon + 1), source, line_no)});
      max_col = std::max(max_col, idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::Parse, source + ": no data rows");
  const Index d = opts.features > 0 ? opts.features : max_col;
  if (max_col > d) throw Error(ErrorCode::Parse, source + ": feature index exceeds the configured feature count");
  Dataset out;
  out.a = RMat::Zero(static_cast<Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const Entry& e : rows[i]) out.a(static_cast<Index>(i), e.col) = e.value;
  }
  out.labels = Eigen::Map<RVec>(labels.data(), static_cast<Index>(labels.size()));
  return out;
}

}  // namespace

DataFormat format_from_path(const std::string& path) {
  auto ends_with = [&](const std::string& suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".svm") || ends_with(".libsvm") ? DataFormat::Libsvm : DataFormat::Csv;
}

void standardize_columns(RMat& a) {
  const double n = static_cast<double>(a.rows());
  if (a.rows() == 0) return;
  for (Index j = 0; j < a.cols(); ++j) {
    const double mean = a.col(j).sum() / n;
    a.col(j).array() -= mean;
    const double sd = std::sqrt(a.col(j).squaredNorm() / n);
    if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      a.col(j) /= sd;
    } else {
      a.col(j).setZero();
    }
  }
}

RVec map_labels(const RVec& raw, std::optional<double> positive) {
  std::map<double, Index> counts;
  for (Index i = 0; i < raw.size(); ++i) {
    if (raw(i) != std::round(raw(i))) {
      throw Error(ErrorCode::InvalidInput,
                  "label " + std::to_string(raw(i)) + " on row " + std::to_string(i + 1) +
                      " is not an integer class; no mapping rule applies");
    }
    ++counts[raw(i)];
  }
  RVec out(raw.size());
  if (positive.has_value()) {
    for (Index i = 0; i < raw.size(); ++i) out(i) = raw(i) == *positive ? 1.0 : 0.0;
    return out;
  }
  const bool binary01 = std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.first == 0.0 || kv.first == 1.0; });
  if (binary01) return raw;
  if (counts.size() == 2) {
    const double low = counts.begin()->first;
    for (Index i = 0; i < raw.size(); ++i) out(i) = raw(i) == low ? 0.0 : 1.0;
    return out;
  }
  double majority = counts.begin()->first;
  Index best = -1;
  for (const auto& [cls, count] : counts) {
    if (count > best) {
      best = count;
      majority = cls;
    }
  }
  for (Index i = 0; i < raw.size(); ++i) out(i) = raw(i) == majority ? 1.0 : 0.0;
  return out;
}

Dataset parse_dataset(const std::string& text, const LoadOptions& opts, const std::string& source) {
  Dataset out = opts.format == DataFormat::Csv ? parse_csv(text, opts, source) : parse_libsvm(text, opts, source);
  out.labels = map_labels(out.labels, opts.positive_class);
  if (opts.standardize) standardize_columns(out.a);
  out.description = std::to_string(out.a.rows()) + " rows x " + std::to_string(out.a.cols()) + " features from " + source;
  return out;
}

Dataset load_dataset(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Dataset out = parse_dataset(buf.str(), opts, path);
  std::clog << "loaded " << out.description << '\n';
  return out;
}

}  // namespace nonpsd::bench
