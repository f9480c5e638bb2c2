#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpdp/classifiers.hpp"
#include "cpdp/data.hpp"
#include "cpdp/metrics.hpp"
#include "cpdp/nnfilter.hpp"
#include "cpdp/resampling.hpp"
#include "cpdp/stats.hpp"

namespace cpdp {

/// A run counts as practically useful when pd, AUC or g-measure exceed their
/// threshold, or pf falls below its threshold (all strict).
struct PracticalThresholds {
  double pd = 75.0;
  double auc = 75.0;
  double g = 75.0;
  double pf = 15.0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::vector<std::filesystem::path> targets;
  std::vector<std::filesystem::path> sources;
  std::vector<ResamplerKind> resamplers{kAllResamplers.begin(), kAllResamplers.end()};
  std::vector<std::string> models{"NB", "KNN", "RF"};
  std::size_t k_filter = 10;
  std::size_t k_smote = 5;
  double alpha = 0.05;
  PracticalThresholds thresholds;
  std::uint64_t seed = 42;
  std::size_t rf_trees = 1000;
  std::filesystem::path out_dir = "results";

  /// Throws ConfigError on empty lists, unknown models, zero k or trees.
  void validate() const;
};

/// Reads the JSON config. Relative paths resolve against the file's folder.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
/// Canonical JSON text of the settings that determine results.
std::string canonical_config(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

/// Seed of the resampling stream for one (target, resampler).
std::uint64_t resample_seed(std::uint64_t master, const std::string& target, ResamplerKind kind);
/// Seed recorded for one run and handed to the model (RF random state).
std::uint64_t run_seed(std::uint64_t master, const std::string& target, ResamplerKind kind,
                       const std::string& model);

struct RunLogEntry {
  std::string run_id;
  std::vector<std::string> notes;
  double millis = 0.0;
};

struct RunLog {
  std::vector<RunLogEntry> entries;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
};

struct ExperimentResult {
  std::vector<EvaluationRecord> records;
  RunLog log;
};

/// Training set for one target: pool rows nearest the standardized target.
struct PreparedTarget {
  Dataset target;    // standardized
  FilterResult filtered;
};

/// Standardizes pool and target with pool statistics, then NN-filters.
PreparedTarget prepare_target(const SourcePool& raw_pool, const Standardizer& scaler,
                              const Dataset& raw_target, std::size_t k_filter, unsigned jobs = 1);

/// Trains every model on `train` and scores `target`, appending one record
/// per model. Single-class training data yields flagged records.
void evaluate_models(const Dataset& train, const Dataset& target, ResamplerKind kind,
                     const std::vector<std::string>& models, const ModelParams& base,
                     std::uint64_t master_seed, std::vector<EvaluationRecord>& out,
                     std::vector<RunLogEntry>* log = nullptr);

/// Throws if any training instance originates from the target dataset.
void assert_no_target_leak(const Dataset& train, const Dataset& target);

/// Loaded inputs of a sweep: raw targets, the merged raw pool and the pool
/// standardizer.
struct Study {
  std::vector<Dataset> targets;
  SourcePool pool;
  Standardizer scaler;
};

/// Loads every file and checks that no target project is also a source.
Study load_study(const ExperimentConfig& config);

/// Runs filter -> resample -> train -> score for every target, treatment and
/// model. Records come back in (target, resampler, model) config order.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

struct QuartileRow {
  std::string model;
  std::string resampler;
  Measure measure;
  std::size_t n = 0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

/// Linear interpolation between closest ranks; q in [0, 1].
double percentile(std::vector<double> values, double q);

std::vector<QuartileRow> quartile_summary(std::span<const EvaluationRecord> records);

struct PracticalRow {
  std::string resampler;
  Measure measure;
  std::size_t successes = 0;
  std::size_t runs = 0;
  double rate() const { return runs ? 100.0 * static_cast<double>(successes) / static_cast<double>(runs) : 0.0; }
};

std::vector<PracticalRow> practical_success(std::span<const EvaluationRecord> records,
                                            const PracticalThresholds& thresholds);

/// One NOS-versus-treatment comparison for a model and measure; the outcome
/// is from the treatment's side. p_adjusted is Hochberg-adjusted within the
/// (model, measure) family.
struct EffectCell {
  std::string model;
  std::string resampler;
  Measure measure;
  ComparisonCell comparison;
  double p_adjusted = 1.0;
  Outcome outcome_adjusted = Outcome::tie;
};

std::vector<EffectCell> effect_grid(std::span<const EvaluationRecord> records, double alpha);

struct Analysis {
  std::vector<QuartileRow> quartiles;
  std::vector<WinTieLossTable> win_tie_loss;  // one per measure
  std::vector<EffectCell> effects;
  std::vector<PracticalRow> practical;
};

Analysis analyze(std::span<const EvaluationRecord> records, double alpha,
                 const PracticalThresholds& thresholds);

// Report files. All CSVs are UTF-8 with a header row; floats carry 6 decimals.

void write_raw_csv(std::span<const EvaluationRecord> records, std::ostream& out);
std::vector<EvaluationRecord> read_raw_csv(std::istream& in, const std::string& name = "runs.csv");
std::vector<EvaluationRecord> read_raw_csv(const std::filesystem::path& path);

/// Records exactly as they read back from the raw CSV, so statistics from a
/// full run and from `stats --raw` agree to the byte.
std::vector<EvaluationRecord> round_trip_raw(std::span<const EvaluationRecord> records);

struct ReportFiles {
  static constexpr const char* raw = "runs.csv";
  static constexpr const char* quartiles = "quartiles.csv";
  static constexpr const char* effects = "effect_grid.csv";
  static constexpr const char* practical = "practical_success.csv";
  static constexpr const char* run_log = "runlog.json";
  static std::string win_tie_loss(Measure m);
};

/// Writes quartiles, one win-tie-loss table per measure, the effect grid and
/// practical-success rates into `dir`.
void write_tables(const Analysis& analysis, const std::filesystem::path& dir);

/// Writes runs.csv, the tables and runlog.json. Returns false when no record
/// carries a usable value (headers-only output).
bool emit_reports(const ExperimentResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& dir);

void write_run_log(const RunLog& log, const ExperimentConfig& config, std::ostream& out);

}  // namespace cpdp
