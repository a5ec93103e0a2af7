#pragma once

#include <string>
#include <vector>

#include "coop/common.hpp"

namespace coop {

enum class Family { gaussian, binomial };

// One raw feature block as ingested: rows are observations shared with
// every other view, columns are this view's features.
struct DataView {
  std::string name;
  Matrix values;
  std::vector<std::string> column_names;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

// Column-standardized copy of a view plus the statistics needed to map
// new raw data onto the training scale.
struct StandardizedView {
  std::string name;
  Matrix values;
  Vector column_means;
  Vector column_sds;  // sentinel 1 for constant columns
  std::vector<std::string> column_names;
  std::vector<Index> constant_columns;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

struct Response {
  Family family = Family::gaussian;
  // Centered values for gaussian; raw 0/1 labels for binomial.
  Vector values;
  double mean = 0.0;

  Index size() const { return values.size(); }
};

// Aligned multiview sample. Standardized views drive the solvers; the raw
// views are kept so cross-validation can restandardize per training fold.
struct MultiViewDataset {
  std::vector<DataView> raw_views;
  std::vector<StandardizedView> views;
  Response response;

  Index n() const { return response.size(); }
  std::size_t n_views() const { return views.size(); }
  Index total_cols() const;
  // First column of view m inside the concatenated coefficient vector.
  Index col_offset(std::size_t m) const;
};

// Reads a comma-separated numeric file. With has_header the first line
// supplies column names; otherwise names are V1..Vp. Rejects ragged rows,
// non-numeric or non-finite cells (with 1-based row/column in the
// message), and empty input.
DataView load_view(const std::string& path, bool has_header,
                   const std::string& name = "");

// Same format restricted to a single column.
Vector load_response_values(const std::string& path, bool has_header);

// Column-wise (x - mean) / sd with the population denominator n in sd.
// Constant columns become zeros with sd recorded as sentinel 1 and the
// column index flagged.
StandardizedView standardize(const DataView& view);

// Inverse of standardize given the recorded statistics.
Matrix destandardize(const StandardizedView& view);

// Applies training statistics to new raw data with matching columns.
Matrix apply_standardization(const StandardizedView& stats, const Matrix& raw);

// Gaussian: subtracts the mean. Binomial: requires labels in {0,1} and
// keeps them as-is; the mean is recorded either way.
Response center_response(const Vector& y, Family family);

// Validates alignment (equal row counts, unique non-empty view names,
// at least one view), standardizes, and bundles.
MultiViewDataset assemble(std::vector<DataView> views, const Vector& y,
                          Family family);

}  // namespace coop
