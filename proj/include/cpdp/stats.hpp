#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cpdp/metrics.hpp"

namespace cpdp {

/// Brunner-Munzel test of H0: P(X < Y) + P(X = Y) / 2 = 1/2.
struct BMResult {
  /// P(X < Y) + P(X = Y) / 2. Above 0.5 means y tends to be larger.
  double relative_effect = 0.5;
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  /// Rank variance is zero and the samples do not separate; callers treat
  /// the comparison as a tie.
  bool degenerate = false;
};

/// Two-sided test with a Satterthwaite t approximation. Both samples need at
/// least two values. When the rank variance is zero but the samples are
/// completely separated (relative effect 0 or 1) the p-value is 0.
BMResult brunner_munzel(std::span<const double> x, std::span<const double> y);

enum class EffectMagnitude { negligible, medium, large };
const char* to_string(EffectMagnitude m);

/// |delta| <= 0.112 negligible, < 0.428 medium, otherwise large.
EffectMagnitude effect_magnitude(double delta);

struct CliffResult {
  double delta = 0.0;
  EffectMagnitude magnitude = EffectMagnitude::negligible;
};

/// delta = (#{x_i > y_j} - #{x_i < y_j}) / (|x| |y|).
CliffResult cliffs_delta(std::span<const double> x, std::span<const double> y);

/// Hochberg step-up adjusted p-values, in input order.
std::vector<double> hochberg_adjust(std::span<const double> p_values);

enum class Outcome { win, tie, loss };
const char* to_string(Outcome o);
inline Outcome flip(Outcome o) {
  return o == Outcome::win ? Outcome::loss : o == Outcome::loss ? Outcome::win : Outcome::tie;
}

/// A predictor: one model trained on data treated by one resampler.
struct Subject {
  std::string model;
  std::string resampler;
  friend bool operator==(const Subject&, const Subject&) = default;
};

/// One value per target dataset for one subject and measure.
struct SubjectSeries {
  Subject subject;
  std::map<std::string, double> by_target;
};

/// Outcome of `first` against `second`, decided on their common targets.
struct ComparisonCell {
  Subject first;
  Subject second;
  Measure measure = Measure::auc;
  Outcome outcome = Outcome::tie;
  BMResult test;
  CliffResult effect;
  std::size_t common_targets = 0;
  std::string note;
};

/// Compares two subjects. `first` wins when the test is significant at
/// `alpha` and its values are better (larger, or smaller for pf).
ComparisonCell compare_subjects(const SubjectSeries& first, const SubjectSeries& second,
                                Measure measure, double alpha);

struct WinTieLossRow {
  Subject subject;
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  long wins_minus_losses() const { return static_cast<long>(wins) - static_cast<long>(losses); }
};

struct WinTieLossTable {
  Measure measure = Measure::auc;
  /// Sorted by wins - losses, then wins, both descending; remaining ties keep
  /// input order.
  std::vector<WinTieLossRow> rows;
  std::vector<ComparisonCell> cells;
};

/// Round-robin over every unordered pair of subjects.
WinTieLossTable win_tie_loss(std::span<const SubjectSeries> series, Measure measure,
                             double alpha = 0.05);

/// Non-flagged values of one measure grouped by subject, subjects in order of
/// first appearance.
std::vector<SubjectSeries> series_by_subject(std::span<const EvaluationRecord> records,
                                             Measure measure);

}  // namespace cpdp
