#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpdp/types.hpp"

namespace cpdp {

enum class Label : unsigned char { clean = 0, defective = 1 };

constexpr Label other(Label l) { return l == Label::clean ? Label::defective : Label::clean; }
const char* to_string(Label l);

/// Where an instance came from: the dataset it was read from and its data-row
/// index there (0-based, header excluded).
struct Origin {
  std::string dataset;
  std::size_t row = 0;

  friend auto operator<=>(const Origin&, const Origin&) = default;
  friend bool operator==(const Origin&, const Origin&) = default;
};

struct Instance {
  FeatureVector features;
  int defect_count = 0;
  Label label = Label::clean;
  Origin origin;
};

/// Base for every failure caused by input data (as opposed to usage).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& column,
             const std::string& what);
  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

class EmptyDatasetError : public DataError {
 public:
  using DataError::DataError;
};

/// The 20 static-code metric columns of a PROMISE CK export, in file order.
const std::vector<std::string>& promise_schema();

/// Name of the defect-count column in PROMISE exports.
inline constexpr const char* kDefectColumn = "bug";

/// Immutable, schema-consistent collection of instances.
///
/// Features are stored densely (row per instance). Labels are always derived
/// from the defect counts. Columns present in a source file but not in the
/// schema are carried along per row as provenance.
class Dataset {
 public:
  Dataset(std::string name, std::string release, std::vector<std::string> schema,
          FeatureMatrix features, std::vector<int> defect_counts, std::vector<Origin> origins,
          std::vector<std::string> extra_columns = {},
          std::vector<std::vector<std::string>> extra_values = {});

  const std::string& name() const { return name_; }
  const std::string& release() const { return release_; }
  const std::vector<std::string>& schema() const { return schema_; }
  const FeatureMatrix& features() const { return features_; }
  std::size_t size() const { return defects_.size(); }
  std::size_t dims() const { return schema_.size(); }

  int defect_count(std::size_t i) const { return defects_[i]; }
  Label label(std::size_t i) const { return defects_[i] > 0 ? Label::defective : Label::clean; }
  const Origin& origin(std::size_t i) const { return origins_[i]; }
  const std::vector<int>& defect_counts() const { return defects_; }
  const std::vector<Origin>& origins() const { return origins_; }
  std::vector<Label> labels() const;
  Instance instance(std::size_t i) const;

  const std::vector<std::string>& extra_columns() const { return extra_columns_; }
  const std::vector<std::string>& extra_values(std::size_t i) const { return extra_values_[i]; }

  std::size_t count(Label l) const;
  std::size_t n_defective() const { return count(Label::defective); }
  std::size_t n_clean() const { return count(Label::clean); }
  double defect_ratio() const { return static_cast<double>(n_defective()) / size(); }

  /// Rows in the given order; duplicates allowed.
  Dataset subset(std::span<const std::size_t> rows, std::string name) const;
  Dataset with_name(std::string name) const;
  /// Same rows and metadata over a replacement feature matrix of equal shape.
  Dataset with_features(FeatureMatrix features) const;

 private:
  std::string name_;
  std::string release_;
  std::vector<std::string> schema_;
  FeatureMatrix features_;
  std::vector<int> defects_;
  std::vector<Origin> origins_;
  std::vector<std::string> extra_columns_;
  std::vector<std::vector<std::string>> extra_values_;
};

/// Reads a comma-separated metrics file. Schema columns are matched
/// case-insensitively. If the file has `origin_dataset` and `origin_row`
/// columns (as written by write_dataset) the stored provenance is restored,
/// otherwise origins are (file stem, data-row index).
Dataset load_dataset(const std::filesystem::path& path,
                     const std::vector<std::string>& schema = promise_schema());

/// Parses CSV text; `name` plays the role of the file stem.
Dataset parse_dataset(std::istream& in, const std::string& name,
                      const std::vector<std::string>& schema = promise_schema());

/// Writes provenance, extra columns, schema columns and `bug`, with
/// round-trip precision for every feature value.
void write_dataset(const Dataset& data, std::ostream& out);
void write_dataset(const Dataset& data, const std::filesystem::path& path);

/// Merged training pool with per-instance provenance.
struct SourcePool {
  Dataset data;
  std::vector<std::string> members;
  std::vector<std::size_t> member_sizes;
};

SourcePool merge_sources(std::span<const Dataset> datasets);

/// Per-feature z-score transform. Constant features map to 0.
class Standardizer {
 public:
  static Standardizer fit(const FeatureMatrix& reference);
  static Standardizer fit(const Dataset& reference) { return fit(reference.features()); }

  FeatureMatrix apply(const FeatureMatrix& x) const;
  FeatureMatrix invert(const FeatureMatrix& z) const;
  Dataset apply(const Dataset& data) const { return data.with_features(apply(data.features())); }

  const FeatureVector& mean() const { return mean_; }
  const FeatureVector& stddev() const { return stddev_; }
  bool is_constant(Eigen::Index j) const { return constant_[j] != 0; }

 private:
  FeatureVector mean_;
  FeatureVector stddev_;
  Vector<unsigned char> constant_;
};

/// Project part of a release name: "ant-1.3" -> "ant", "camel-1.6" -> "camel".
std::string project_of(const std::string& release_name);

}  // namespace cpdp
