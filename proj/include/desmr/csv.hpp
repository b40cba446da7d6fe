#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "desmr/datagen.hpp"

namespace desmr {

struct CsvLoadOptions {
  std::string response_column;
  std::string group_column;
  bool drop_missing = true;       // drop rows with missing cells
  bool standardize = true;        // predictors to zero mean / unit variance
  double test_fraction = 0.2;     // per-node held-out split
  std::uint64_t seed = 1;
  /// Columns whose missing-value fraction is at least this are dropped
  /// before row filtering (so one sparse column doesn't eat the dataset).
  double column_missing_drop_fraction = 0.5;
  /// Optional remapping of group values (CSV with lines "key,value");
  /// e.g. a state code -> region id table. Empty string disables.
  std::string group_map_csv;
};

struct CsvLoadResult {
  NetworkDataset data;
  std::vector<std::string> group_labels;    // node j <-> group_labels[j]
  std::vector<std::string> feature_names;   // surviving predictor columns
  std::vector<std::string> dropped_columns;
  Index rows_used = 0;
};

/// Reads a header CSV, partitions rows into nodes by the group column, and
/// builds per-node train/test splits. Missing cells are empty fields or
/// "?". Non-numeric and zero-variance predictors are dropped with a note in
/// `dropped_columns`. Standardization statistics come from the training
/// split only. Group labels are sorted; node indices follow that order.
CsvLoadResult load_csv(const std::string& path, const CsvLoadOptions& opts);

}  // namespace desmr
