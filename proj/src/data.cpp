#include "cpdp/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "cpdp/detail/csv.hpp"

namespace cpdp {

const char* to_string(Label l) { return l == Label::defective ? "defective" : "clean"; }

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& column,
                       const std::string& what)
    : DataError(file + ":" + std::to_string(line) + ": column '" + column + "': " + what),
      line_(line),
      column_(column) {}

const std::vector<std::string>& promise_schema() {
  static const std::vector<std::string> schema{
      "wmc", "dit", "noc",  "cbo", "rfc", "lcom", "lcom3",  "npm",    "dam", "moa",
      "mfa", "cam", "ic",   "cbm", "amc", "ca",   "ce",     "max_cc", "avg_cc", "loc"};
  return schema;
}

Dataset::Dataset(std::string name, std::string release, std::vector<std::string> schema,
                 FeatureMatrix features, std::vector<int> defect_counts,
                 std::vector<Origin> origins, std::vector<std::string> extra_columns,
                 std::vector<std::vector<std::string>> extra_values)
    : name_(std::move(name)),
      release_(std::move(release)),
      schema_(std::move(schema)),
      features_(std::move(features)),
      defects_(std::move(defect_counts)),
      origins_(std::move(origins)),
      extra_columns_(std::move(extra_columns)),
      extra_values_(std::move(extra_values)) {
  if (defects_.empty()) throw EmptyDatasetError("dataset '" + name_ + "' has no instances");
  const auto n = static_cast<Eigen::Index>(defects_.size());
  if (features_.rows() != n || origins_.size() != defects_.size()) {
    throw std::invalid_argument("dataset '" + name_ + "': row counts disagree");
  }
  if (features_.cols() != static_cast<Eigen::Index>(schema_.size())) {
    throw SchemaError("dataset '" + name_ + "': feature width " +
                      std::to_string(features_.cols()) + " does not match schema length " +
                      std::to_string(schema_.size()));
  }
  if (!features_.allFinite()) {
    throw DataError("dataset '" + name_ + "' contains non-finite feature values");
  }
  if (std::any_of(defects_.begin(), defects_.end(), [](int d) { return d < 0; })) {
    throw DataError("dataset '" + name_ + "' contains a negative defect count");
  }
  if (extra_values_.empty()) {
    extra_values_.assign(defects_.size(), std::vector<std::string>(extra_columns_.size()));
  } else if (extra_values_.size() != defects_.size()) {
    throw std::invalid_argument("dataset '" + name_ + "': extra value rows disagree");
  }
}

std::vector<Label> Dataset::labels() const {
  std::vector<Label> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = label(i);
  return out;
}

Instance Dataset::instance(std::size_t i) const {
  return Instance{features_.row(static_cast<Eigen::Index>(i)).transpose(), defects_[i], label(i),
                  origins_[i]};
}

std::size_t Dataset::count(Label l) const {
  return static_cast<std::size_t>(std::count_if(
      defects_.begin(), defects_.end(),
      [l](int d) { return (d > 0 ? Label::defective : Label::clean) == l; }));
}

Dataset Dataset::subset(std::span<const std::size_t> rows, std::string name) const {
  FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> defects;
  std::vector<Origin> origins;
  std::vector<std::vector<std::string>> extras;
  defects.reserve(rows.size());
  origins.reserve(rows.size());
  extras.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    x.row(static_cast<Eigen::Index>(k)) = features_.row(static_cast<Eigen::Index>(r));
    defects.push_back(defects_[r]);
    origins.push_back(origins_[r]);
    extras.push_back(extra_values_[r]);
  }
  return Dataset(std::move(name), release_, schema_, std::move(x), std::move(defects),
                 std::move(origins), extra_columns_, std::move(extras));
}

Dataset Dataset::with_name(std::string name) const {
  Dataset copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

Dataset Dataset::with_features(FeatureMatrix features) const {
  if (features.rows() != features_.rows() || features.cols() != features_.cols()) {
    throw std::invalid_argument("with_features: shape mismatch");
  }
  return Dataset(name_, release_, schema_, std::move(features), defects_, origins_,
                 extra_columns_, extra_values_);
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string release_of(const std::string& name) {
  const auto dash = name.rfind('-');
  if (dash == std::string::npos || dash + 1 >= name.size()) return {};
  const std::string tail = name.substr(dash + 1);
  return std::isdigit(static_cast<unsigned char>(tail.front())) ? tail : std::string{};
}

}  // namespace

std::string project_of(const std::string& release_name) {
  std::string base = lower(release_name);
  const std::string rel = release_of(base);
  if (!rel.empty()) base.erase(base.size() - rel.size() - 1);
  while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
  return base;
}

Dataset parse_dataset(std::istream& in, const std::string& name,
                      const std::vector<std::string>& schema) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = detail::split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw EmptyDatasetError(name + ": empty file");
  if (line_no == 1 && header.front().starts_with("\xEF\xBB\xBF")) header.front().erase(0, 3);

  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) {
    header[c] = trim(header[c]);
    column_of.emplace(lower(header[c]), c);
  }
  auto require = [&](const std::string& col) {
    auto it = column_of.find(lower(col));
    if (it == column_of.end()) {
      throw SchemaError(name + ": missing required column '" + col + "'");
    }
    return it->second;
  };
  std::vector<std::size_t> feature_cols;
  feature_cols.reserve(schema.size());
  for (const auto& col : schema) feature_cols.push_back(require(col));
  const std::size_t bug_col = require(kDefectColumn);

  std::optional<std::size_t> origin_ds_col, origin_row_col;
  if (auto it = column_of.find("origin_dataset"); it != column_of.end()) origin_ds_col = it->second;
  if (auto it = column_of.find("origin_row"); it != column_of.end()) origin_row_col = it->second;
  const bool stored_origins = origin_ds_col && origin_row_col;

  std::vector<bool> is_used(header.size(), false);
  for (auto c : feature_cols) is_used[c] = true;
  is_used[bug_col] = true;
  if (stored_origins) is_used[*origin_ds_col] = is_used[*origin_row_col] = true;
  std::vector<std::string> extra_columns;
  std::vector<std::size_t> extra_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!is_used[c]) {
      extra_columns.push_back(header[c]);
      extra_cols.push_back(c);
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> defects;
  std::vector<Origin> origins;
  std::vector<std::vector<std::string>> extras;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(name, line_no, "*",
                       "expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()));
    }
    std::vector<double> values(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
      auto v = parse_double(trim(cells[feature_cols[j]]));
      if (!v) {
        throw ParseError(name, line_no, schema[j],
                         "non-numeric value '" + cells[feature_cols[j]] + "'");
      }
      values[j] = *v;
    }
    auto bug = parse_double(trim(cells[bug_col]));
    if (!bug || *bug < 0 || *bug != std::floor(*bug)) {
      throw ParseError(name, line_no, kDefectColumn,
                       "defect count must be a nonnegative integer, got '" + cells[bug_col] + "'");
    }
    if (stored_origins) {
      const std::string row_text = trim(cells[*origin_row_col]);
      std::size_t row = 0;
      auto [ptr, ec] = std::from_chars(row_text.data(), row_text.data() + row_text.size(), row);
      if (ec != std::errc() || ptr != row_text.data() + row_text.size()) {
        throw ParseError(name, line_no, "origin_row", "invalid row index '" + row_text + "'");
      }
      origins.push_back(Origin{trim(cells[*origin_ds_col]), row});
    } else {
      origins.push_back(Origin{name, rows.size()});
    }
    std::vector<std::string> extra;
    extra.reserve(extra_cols.size());
    for (auto c : extra_cols) extra.push_back(cells[c]);
    extras.push_back(std::move(extra));
    rows.push_back(std::move(values));
    defects.push_back(static_cast<int>(*bug));
  }
  if (rows.empty()) throw EmptyDatasetError(name + ": no data rows");

  FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(schema.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return Dataset(name, release_of(name), schema, std::move(x), std::move(defects),
                 std::move(origins), std::move(extra_columns), std::move(extras));
}

Dataset load_dataset(const std::filesystem::path& path, const std::vector<std::string>& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_dataset(in, path.stem().string(), schema);
}

void write_dataset(const Dataset& data, std::ostream& out) {
  std::vector<std::string> header{"origin_dataset", "origin_row"};
  header.insert(header.end(), data.extra_columns().begin(), data.extra_columns().end());
  header.insert(header.end(), data.schema().begin(), data.schema().end());
  header.emplace_back(kDefectColumn);
  detail::write_csv_row(out, header);

  char buf[64];
  std::vector<std::string> cells;
  for (std::size_t i = 0; i < data.size(); ++i) {
    cells.clear();
    cells.push_back(data.origin(i).dataset);
    cells.push_back(std::to_string(data.origin(i).row));
    for (const auto& v : data.extra_values(i)) cells.push_back(v);
    for (Eigen::Index j = 0; j < data.features().cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.features()(static_cast<Eigen::Index>(i), j));
      cells.emplace_back(buf);
    }
    cells.push_back(std::to_string(data.defect_count(i)));
    detail::write_csv_row(out, cells);
  }
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_dataset(data, out);
}

SourcePool merge_sources(std::span<const Dataset> datasets) {
  if (datasets.empty()) throw EmptyDatasetError("merge_sources: no source datasets");
  const auto& schema = datasets.front().schema();
  std::size_t total = 0;
  for (const auto& d : datasets) {
    if (d.schema() != schema) {
      throw SchemaError("schema mismatch between '" + datasets.front().name() + "' and '" +
                        d.name() + "'");
    }
    total += d.size();
  }
  // Extra columns are unioned by name; rows lacking a column get an empty cell.
  std::vector<std::string> extra_columns;
  for (const auto& d : datasets) {
    for (const auto& c : d.extra_columns()) {
      if (std::find(extra_columns.begin(), extra_columns.end(), c) == extra_columns.end()) {
        extra_columns.push_back(c);
      }
    }
  }

  FeatureMatrix x(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(schema.size()));
  std::vector<int> defects;
  std::vector<Origin> origins;
  std::vector<std::vector<std::string>> extras;
  std::vector<std::string> members;
  std::vector<std::size_t> member_sizes;
  Eigen::Index at = 0;
  for (const auto& d : datasets) {
    x.middleRows(at, static_cast<Eigen::Index>(d.size())) = d.features();
    at += static_cast<Eigen::Index>(d.size());
    defects.insert(defects.end(), d.defect_counts().begin(), d.defect_counts().end());
    origins.insert(origins.end(), d.origins().begin(), d.origins().end());
    std::vector<std::size_t> map;
    for (const auto& c : d.extra_columns()) {
      map.push_back(static_cast<std::size_t>(
          std::find(extra_columns.begin(), extra_columns.end(), c) - extra_columns.begin()));
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      std::vector<std::string> row(extra_columns.size());
      for (std::size_t c = 0; c < map.size(); ++c) row[map[c]] = d.extra_values(i)[c];
      extras.push_back(std::move(row));
    }
    members.push_back(d.name());
    member_sizes.push_back(d.size());
  }
  return SourcePool{Dataset("pool", "", schema, std::move(x), std::move(defects),
                            std::move(origins), std::move(extra_columns), std::move(extras)),
                    std::move(members), std::move(member_sizes)};
}

Standardizer Standardizer::fit(const FeatureMatrix& reference) {
  if (reference.rows() == 0) throw EmptyDatasetError("standardizer reference is empty");
  Standardizer s;
  const Eigen::Index p = reference.cols();
  s.mean_ = reference.colwise().mean().transpose();
  s.stddev_.resize(p);
  s.constant_.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = reference.col(j);
    const bool constant = col.maxCoeff() == col.minCoeff();
    s.constant_[j] = constant ? 1 : 0;
    if (constant) {
      s.mean_[j] = col[0];
      s.stddev_[j] = 0.0;
    } else {
      s.stddev_[j] = std::sqrt((col.array() - s.mean_[j]).square().mean());
    }
  }
  return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
  if (x.cols() != mean_.size()) throw SchemaError("standardizer: width mismatch");
  FeatureMatrix z(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (constant_[j]) {
      z.col(j).setZero();
    } else {
      z.col(j) = (x.col(j).array() - mean_[j]) / stddev_[j];
    }
  }
  return z;
}

FeatureMatrix Standardizer::invert(const FeatureMatrix& z) const {
  if (z.cols() != mean_.size()) throw SchemaError("standardizer: width mismatch");
  FeatureMatrix x(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (constant_[j]) {
      x.col(j).setConstant(mean_[j]);
    } else {
      x.col(j) = z.col(j).array() * stddev_[j] + mean_[j];
    }
  }
  return x;
}

}  // namespace cpdp
