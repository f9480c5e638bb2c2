#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpdp/data.hpp"

namespace cpdp {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Positive class is defective. Lengths must match and be nonzero.
ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> truth);

/// Recall in percent; nullopt when there are no defective instances.
std::optional<double> recall_pd(const ConfusionMatrix& cm);
/// False-alarm rate in percent; nullopt when there are no clean instances.
std::optional<double> false_alarm_pf(const ConfusionMatrix& cm);

/// Harmonic mean of pd and 100 - pf, in percent. 0 when both terms are 0.
template <typename Scalar>
Scalar g_measure(Scalar pd, Scalar pf) {
  const Scalar specificity = Scalar(100) - pf;
  const Scalar denom = pd + specificity;
  if (denom == Scalar(0)) return Scalar(0);
  return Scalar(2) * pd * specificity / denom;
}

/// Mid-ranks (1-based, ties share their average rank).
template <typename Scalar>
std::vector<double> midranks(std::span<const Scalar> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Ranks i+1 .. j share their mean.
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) rank[order[t]] = mid;
    i = j;
  }
  return rank;
}

/// Area under the ROC curve in percent via the rank-sum statistic, so tied
/// scores count one half. nullopt when truth holds a single class.
template <typename Scalar>
std::optional<double> auc(std::span<const Scalar> scores, std::span<const Label> truth) {
  if (scores.size() != truth.size()) throw std::invalid_argument("auc: length mismatch");
  const auto rank = midranks(scores);
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == Label::defective) {
      rank_sum += rank[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = truth.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return 100.0 * u / (np * static_cast<double>(n_neg));
}

template <typename Scalar>
std::optional<double> auc(const std::vector<Scalar>& scores, const std::vector<Label>& truth) {
  return auc(std::span<const Scalar>(scores), std::span<const Label>(truth));
}

enum class Measure { pd, pf, g_measure, auc };

inline constexpr Measure kAllMeasures[] = {Measure::auc, Measure::g_measure, Measure::pd,
                                           Measure::pf};

const char* to_string(Measure m);
/// pf is the only measure where lower is better.
inline bool higher_is_better(Measure m) { return m != Measure::pf; }

struct EvaluationRecord {
  std::string target;
  std::string model;
  std::string resampler;
  std::uint64_t seed = 0;
  std::optional<double> pd;
  std::optional<double> pf;
  std::optional<double> g_measure;
  std::optional<double> auc;
  /// Degeneracy and undefined-metric flags; a flagged value is excluded from
  /// statistics.
  std::vector<std::string> flags;

  std::optional<double> value(Measure m) const;
};

/// Scores the target: pd, pf and g from the 0.5-threshold predictions, AUC
/// from the raw scores. Undefined measures are left empty and flagged.
void evaluate_scores(EvaluationRecord& record, std::span<const double> scores,
                     std::span<const Label> truth);

}  // namespace cpdp
