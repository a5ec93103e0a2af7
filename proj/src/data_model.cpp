#include "coop/data_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace coop {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string cell = trim(raw);
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    std::ostringstream msg;
    msg << "non-numeric cell at row " << row << ", column " << col;
    throw InputError(msg.str());
  }
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite value at row " << row << ", column " << col;
    throw InputError(msg.str());
  }
  return value;
}

}  // namespace

DataView load_view(const std::string& path, bool has_header,
                   const std::string& name) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw InputError("empty input: " + path);

  DataView view;
  view.name = name.empty() ? path : name;

  std::size_t first_data = 0;
  std::size_t n_cols = 0;
  if (has_header) {
    for (const auto& field : split_csv_line(lines[0]))
      view.column_names.push_back(trim(field));
    n_cols = view.column_names.size();
    first_data = 1;
    if (lines.size() == 1) throw InputError("empty input: " + path);
  } else {
    n_cols = split_csv_line(lines[0]).size();
    for (std::size_t j = 0; j < n_cols; ++j)
      view.column_names.push_back("V" + std::to_string(j + 1));
  }

  const std::size_t n_rows = lines.size() - first_data;
  view.values.resize(static_cast<Index>(n_rows), static_cast<Index>(n_cols));
  for (std::size_t i = 0; i < n_rows; ++i) {
    const auto fields = split_csv_line(lines[first_data + i]);
    if (fields.size() != n_cols) {
      std::ostringstream msg;
      msg << "ragged row " << (i + 1) << ": expected " << n_cols
          << " fields, got " << fields.size();
      throw InputError(msg.str());
    }
    for (std::size_t j = 0; j < n_cols; ++j)
      view.values(static_cast<Index>(i), static_cast<Index>(j)) =
          parse_cell(fields[j], i + 1, j + 1);
  }
  return view;
}

Vector load_response_values(const std::string& path, bool has_header) {
  DataView view = load_view(path, has_header, "response");
  if (view.cols() != 1)
    throw InputError("response file must have exactly one column, got " +
                     std::to_string(view.cols()));
  return view.values.col(0);
}

StandardizedView standardize(const DataView& view) {
  StandardizedView out;
  out.name = view.name;
  out.column_names = view.column_names;
  const Index n = view.rows();
  const Index p = view.cols();
  if (n == 0) throw InputError("standardize: view has no rows");
  out.values.resize(n, p);
  out.column_means.resize(p);
  out.column_sds.resize(p);
  for (Index j = 0; j < p; ++j) {
    const double mean = view.values.col(j).mean();
    const Vector centered = view.values.col(j).array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
    out.column_means[j] = mean;
    if (sd > 0.0) {
      out.column_sds[j] = sd;
      out.values.col(j) = centered / sd;
    } else {
      out.column_sds[j] = 1.0;
      out.values.col(j).setZero();
      out.constant_columns.push_back(j);
    }
  }
  return out;
}

Matrix destandardize(const StandardizedView& view) {
  Matrix out = view.values;
  for (Index j = 0; j < out.cols(); ++j)
    out.col(j) = out.col(j).array() * view.column_sds[j] + view.column_means[j];
  return out;
}

Matrix apply_standardization(const StandardizedView& stats, const Matrix& raw) {
  if (raw.cols() != stats.values.cols())
    throw InputError("apply_standardization: column count mismatch");
  Matrix out(raw.rows(), raw.cols());
  for (Index j = 0; j < raw.cols(); ++j)
    out.col(j) =
        (raw.col(j).array() - stats.column_means[j]) / stats.column_sds[j];
  return out;
}

Response center_response(const Vector& y, Family family) {
  if (y.size() == 0) throw InputError("center_response: empty response");
  Response out;
  out.family = family;
  out.mean = y.mean();
  if (family == Family::gaussian) {
    out.values = y.array() - out.mean;
  } else {
    for (Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw InputError("binomial response must be 0 or 1, got " +
                         std::to_string(y[i]) + " at row " +
                         std::to_string(i + 1));
    out.values = y;
  }
  return out;
}

Index MultiViewDataset::total_cols() const {
  Index total = 0;
  for (const auto& v : views) total += v.cols();
  return total;
}

Index MultiViewDataset::col_offset(std::size_t m) const {
  Index offset = 0;
  for (std::size_t i = 0; i < m; ++i) offset += views[i].cols();
  return offset;
}

MultiViewDataset assemble(std::vector<DataView> views, const Vector& y,
                          Family family) {
  if (views.empty()) throw InputError("assemble: need at least one view");
  std::set<std::string> names;
  for (const auto& v : views) {
    if (v.name.empty()) throw InputError("assemble: view with empty name");
    if (!names.insert(v.name).second)
      throw InputError("assemble: duplicate view name: " + v.name);
    if (v.rows() != y.size())
      throw InputError("assemble: view " + v.name + " has " +
                       std::to_string(v.rows()) + " rows, response has " +
                       std::to_string(y.size()));
    if (v.cols() == 0) throw InputError("assemble: view " + v.name + " has no columns");
  }
  MultiViewDataset out;
  out.response = center_response(y, family);
  out.views.reserve(views.size());
  for (const auto& v : views) out.views.push_back(standardize(v));
  out.raw_views = std::move(views);
  return out;
}

}  // namespace coop
