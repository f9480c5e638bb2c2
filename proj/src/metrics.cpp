#include "cpdp/metrics.hpp"

#include <stdexcept>

#include "cpdp/classifiers.hpp"

namespace cpdp {

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("confusion: length mismatch");
  if (truth.empty()) throw std::invalid_argument("confusion: no instances");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == Label::defective;
    const bool t = truth[i] == Label::defective;
    if (p && t) ++cm.tp;
    else if (p) ++cm.fp;
    else if (t) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

std::optional<double> recall_pd(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) return std::nullopt;
  return 100.0 * static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

std::optional<double> false_alarm_pf(const ConfusionMatrix& cm) {
  if (cm.fp + cm.tn == 0) return std::nullopt;
  return 100.0 * static_cast<double>(cm.fp) / static_cast<double>(cm.fp + cm.tn);
}

const char* to_string(Measure m) {
  switch (m) {
    case Measure::pd: return "pd";
    case Measure::pf: return "pf";
    case Measure::g_measure: return "g_measure";
    case Measure::auc: return "auc";
  }
  return "?";
}

std::optional<double> EvaluationRecord::value(Measure m) const {
  switch (m) {
    case Measure::pd: return pd;
    case Measure::pf: return pf;
    case Measure::g_measure: return g_measure;
    case Measure::auc: return auc;
  }
  return std::nullopt;
}

void evaluate_scores(EvaluationRecord& record, std::span<const double> scores,
                     std::span<const Label> truth) {
  std::vector<Label> predicted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) predicted[i] = classify(scores[i]);
  const auto cm = confusion(predicted, truth);
  record.pd = recall_pd(cm);
  record.pf = false_alarm_pf(cm);
  if (!record.pd) record.flags.push_back("pd undefined: target has no defective instances");
  if (!record.pf) record.flags.push_back("pf undefined: target has no clean instances");
  if (record.pd && record.pf) {
    record.g_measure = g_measure(*record.pd, *record.pf);
    if (*record.pd == 0.0 && *record.pf == 100.0) {
      record.flags.push_back("g_measure set to 0: pd = 0 and pf = 100");
    }
  }
  record.auc = auc(scores, truth);
  if (!record.auc) record.flags.push_back("auc undefined: target has a single class");
}

}  // namespace cpdp
