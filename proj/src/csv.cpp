#include "desmr/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "desmr/rng.hpp"

namespace desmr {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "?" || cell == "NA";
}

bool parse_number(const std::string& cell, double* out) {
  try {
    size_t pos = 0;
    *out = std::stod(cell, &pos);
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    return pos == cell.size();
  } catch (...) {
    return false;
  }
}

std::map<std::string, std::string> load_group_map(const std::string& path) {
  std::map<std::string, std::string> map;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open group map: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_line(line);
    if (cells.size() >= 2) map[cells[0]] = cells[1];
  }
  return map;
}

}  // namespace

CsvLoadResult load_csv(const std::string& path, const CsvLoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::runtime_error("column not found: " + name);
    return static_cast<int>(it - header.begin());
  };
  const int response_col = column_index(opts.response_column);
  const int group_col = column_index(opts.group_column);

  std::vector<std::vector<std::string>> raw;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    cells.resize(header.size());
    raw.push_back(std::move(cells));
  }
  if (raw.empty()) throw std::runtime_error("no data rows in " + path);

  const int ncols = static_cast<int>(header.size());
  CsvLoadResult result;

  // Candidate predictor columns, minus ones that are mostly missing or
  // non-numeric.
  std::vector<int> predictor_cols;
  for (int c = 0; c < ncols; ++c) {
    if (c == response_col || c == group_col) continue;
    int missing = 0;
    bool numeric = true;
    for (const auto& row : raw) {
      if (is_missing(row[c])) {
        ++missing;
        continue;
      }
      double v;
      if (!parse_number(row[c], &v)) {
        numeric = false;
        break;
      }
    }
    const double missing_frac =
        static_cast<double>(missing) / static_cast<double>(raw.size());
    if (!numeric) {
      result.dropped_columns.push_back(header[c] + " (non-numeric)");
    } else if (opts.drop_missing &&
               missing_frac >= opts.column_missing_drop_fraction) {
      result.dropped_columns.push_back(header[c] + " (missing)");
    } else {
      predictor_cols.push_back(c);
    }
  }

  std::map<std::string, std::string> group_map;
  if (!opts.group_map_csv.empty()) group_map = load_group_map(opts.group_map_csv);

  // Rows that survive missing-value filtering, parsed.
  struct ParsedRow {
    std::vector<double> x;
    double y;
    std::string group;
  };
  std::vector<ParsedRow> rows;
  for (const auto& row : raw) {
    if (is_missing(row[response_col]) || is_missing(row[group_col])) continue;
    ParsedRow pr;
    if (!parse_number(row[response_col], &pr.y))
      throw std::runtime_error("non-numeric response value: " + row[response_col]);
    pr.group = row[group_col];
    if (!group_map.empty()) {
      const auto it = group_map.find(pr.group);
      if (it == group_map.end()) continue;  // unmapped group: skip row
      pr.group = it->second;
    }
    bool ok = true;
    pr.x.reserve(predictor_cols.size());
    for (int c : predictor_cols) {
      if (is_missing(row[c])) {
        ok = false;
        break;
      }
      double v;
      parse_number(row[c], &v);
      pr.x.push_back(v);
    }
    if (ok)
      rows.push_back(std::move(pr));
    else if (!opts.drop_missing)
      throw std::runtime_error("missing value with drop_missing disabled");
  }
  if (rows.empty()) throw std::runtime_error("all rows filtered out");
  result.rows_used = static_cast<Index>(rows.size());

  // Node assignment by sorted group label.
  std::vector<std::string> labels;
  for (const auto& r : rows) labels.push_back(r.group);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  result.group_labels = labels;
  auto node_of = [&](const std::string& g) {
    return static_cast<int>(std::lower_bound(labels.begin(), labels.end(), g) -
                            labels.begin());
  };

  const int m = static_cast<int>(labels.size());
  std::vector<std::vector<int>> node_rows(m);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    node_rows[node_of(rows[i].group)].push_back(i);
  for (int j = 0; j < m; ++j)
    if (node_rows[j].empty())
      throw std::runtime_error("empty node for group " + labels[j]);

  // Seeded per-node shuffle, then train/test split.
  std::vector<std::vector<int>> train_idx(m), test_idx(m);
  for (int j = 0; j < m; ++j) {
    auto& idx = node_rows[j];
    Rng rng(derive_seed(opts.seed, j));
    for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.uniform_int(i + 1)]);
    int n_test = static_cast<int>(
        std::floor(opts.test_fraction * static_cast<double>(idx.size())));
    n_test = std::min(n_test, static_cast<int>(idx.size()) - 1);
    test_idx[j].assign(idx.begin(), idx.begin() + n_test);
    train_idx[j].assign(idx.begin() + n_test, idx.end());
    std::sort(train_idx[j].begin(), train_idx[j].end());
    std::sort(test_idx[j].begin(), test_idx[j].end());
  }

  // Standardization statistics from pooled training rows only.
  const int p0 = static_cast<int>(predictor_cols.size());
  Vector mean = Vector::Zero(p0), sq = Vector::Zero(p0);
  Index n_train = 0;
  for (int j = 0; j < m; ++j)
    for (int i : train_idx[j]) {
      for (int c = 0; c < p0; ++c) mean[c] += rows[i].x[c];
      ++n_train;
    }
  mean /= static_cast<double>(n_train);
  for (int j = 0; j < m; ++j)
    for (int i : train_idx[j])
      for (int c = 0; c < p0; ++c) {
        const double d = rows[i].x[c] - mean[c];
        sq[c] += d * d;
      }
  Vector sd(p0);
  std::vector<int> keep;
  for (int c = 0; c < p0; ++c) {
    sd[c] = std::sqrt(sq[c] / static_cast<double>(n_train - 1));
    if (sd[c] > 0.0)
      keep.push_back(c);
    else
      result.dropped_columns.push_back(header[predictor_cols[c]] +
                                       " (constant)");
  }
  for (int c : keep) result.feature_names.push_back(header[predictor_cols[c]]);

  const int p = static_cast<int>(keep.size());
  auto fill = [&](const std::vector<int>& idx, Matrix& X, Vector& y) {
    X.resize(static_cast<Index>(idx.size()), p);
    y.resize(static_cast<Index>(idx.size()));
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) {
      const ParsedRow& r = rows[idx[i]];
      y[i] = r.y;
      for (int c = 0; c < p; ++c) {
        const int c0 = keep[c];
        X(i, c) = opts.standardize ? (r.x[c0] - mean[c0]) / sd[c0] : r.x[c0];
      }
    }
  };

  result.data.nodes.resize(m);
  for (int j = 0; j < m; ++j) {
    fill(train_idx[j], result.data.nodes[j].X, result.data.nodes[j].y);
    fill(test_idx[j], result.data.nodes[j].X_test, result.data.nodes[j].y_test);
  }
  return result;
}

}  // namespace desmr
