#pragma once

// Dataset ingestion: delimited text with the label in one column, or libsvm
// sparse lines. Features are standardized per column; labels are mapped to {0, 1}.

#include <optional>
#include <string>

#include "nonpsd/core_complex.hpp"

namespace nonpsd::bench {

enum class DataFormat { Csv, Libsvm };

struct LoadOptions {
  DataFormat format = DataFormat::Csv;
  char delimiter = ',';
  bool header = false;
  Index label_column = -1;                // csv only; negative counts from the end
  Index features = 0;                     // libsvm only; 0 infers the max index
  std::optional<double> positive_class;   // multi-class: one-vs-rest on this class
  bool standardize = true;
};

struct Dataset {
  RMat a;
  RVec labels;
  std::string description;  // "<n> rows x <d> features from <path>"
};

/// Guesses the format from the extension (.svm, .libsvm -> libsvm, else csv).
DataFormat format_from_path(const std::string& path);

/// Throws Parse (with line number), Io, or InvalidInput for labels without a
/// mapping rule (non-integer values).
Dataset load_dataset(const std::string& path, const LoadOptions& opts = {});
Dataset parse_dataset(const std::string& text, const LoadOptions& opts = {}, const std::string& source = "<text>");

/// Zero mean and unit (population) variance per column; constant columns become zero.
void standardize_columns(RMat& a);

/// {0,1} labels pass through; two integer classes map smaller -> 0; more than
/// two map one-vs-rest on `positive` (default: the most frequent class, ties
/// to the smaller value).
RVec map_labels(const RVec& raw, std::optional<double> positive);

}  // namespace nonpsd::bench
