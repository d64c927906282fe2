#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairshift/dataset.hpp"

namespace fairshift {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Comma-separated, first row header, double-quoted fields allowed. Fields are
// whitespace-trimmed. Throws InputError on ragged rows or an empty body.
CsvTable read_csv_table(const std::filesystem::path& path);
CsvTable parse_csv_table(const std::string& text);

// How raw columns map onto (X, y, s).
//
// The label maps to y = 1 when the raw value is in positive_labels, to y = 0
// when it is in negative_labels (or when negative_labels is empty). The
// sensitive attribute maps to s = 0 when it matches underprivileged_values;
// a single value of the form "<=25", "<25", ">=25" or ">25" is a numeric
// rule instead of a value list. Every other column must be listed as
// dropped, categorical (one-hot, one indicator per distinct value, sorted)
// or numeric.
struct PreprocessSpec {
  std::string name;
  std::string label_column;
  std::vector<std::string> positive_labels;
  std::vector<std::string> negative_labels;
  std::string sensitive_column;
  std::vector<std::string> underprivileged_values;
  std::vector<std::string> privileged_values;
  std::vector<std::string> dropped_columns;
  std::vector<std::string> categorical_columns;
  std::vector<std::string> numeric_columns;
};

// Reads the key-value form: name, label_column, positive_label,
// negative_label, sensitive_column, underprivileged_value, privileged_value,
// drop, categorical, numeric (list values comma-separated).
PreprocessSpec load_preprocess_spec(const std::filesystem::path& path);

// z-score parameters for a set of output columns. Columns with zero spread
// get scale 1.
struct Standardizer {
  std::vector<std::size_t> columns;
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const LabeledDataset& ds, std::vector<std::size_t> columns);
  LabeledDataset apply(const LabeledDataset& ds) const;
};

struct LoadOptions {
  bool standardize = true;
  // When set, these statistics are used instead of ones computed from the
  // loaded rows (pass the training-split statistics when loading a test file).
  std::optional<Standardizer> scaling;
};

struct LoadedData {
  LabeledDataset dataset;
  // Output column indices that came from numeric raw columns.
  std::vector<std::size_t> numeric_indices;
  std::optional<Standardizer> scaling;
};

LoadedData preprocess_table(const CsvTable& table, const PreprocessSpec& spec,
                            const LoadOptions& options = {});
LoadedData load_csv(const std::filesystem::path& path, const PreprocessSpec& spec,
                    const LoadOptions& options = {});

}  // namespace fairshift
