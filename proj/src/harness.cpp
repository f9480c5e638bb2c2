#include "cpdp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cpdp/parallel.hpp"
#include "cpdp/rng.hpp"

namespace cpdp {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (targets.empty()) throw ConfigError("config: no target datasets");
  if (sources.empty()) throw ConfigError("config: no source datasets");
  if (resamplers.empty()) throw ConfigError("config: no resamplers");
  if (models.empty()) throw ConfigError("config: no models");
  for (const auto& m : models) {
    if (!has_model(m)) throw ConfigError("config: unknown model '" + m + "'");
  }
  if (k_filter == 0) throw ConfigError("config: k_filter must be at least 1");
  if (k_smote == 0) throw ConfigError("config: k_smote must be at least 1");
  if (rf_trees == 0) throw ConfigError("config: rf_trees must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must lie in (0, 1)");
  std::set<std::string> seen;
  for (const auto& p : targets) {
    if (!seen.insert(p.stem().string()).second) {
      throw ConfigError("config: duplicate target '" + p.stem().string() + "'");
    }
  }
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> known{"targets", "sources", "resamplers", "models",
                                           "k_filter", "k_smote", "alpha",      "seed",
                                           "rf_trees", "out_dir", "thresholds"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  try {
    for (const auto& t : doc.at("targets")) c.targets.push_back(resolve(t.get<std::string>()));
    for (const auto& s : doc.at("sources")) c.sources.push_back(resolve(s.get<std::string>()));
    if (doc.contains("resamplers")) {
      c.resamplers.clear();
      for (const auto& r : doc["resamplers"]) {
        auto kind = parse_resampler(r.get<std::string>());
        if (!kind) throw ConfigError("config: unknown resampler '" + r.get<std::string>() + "'");
        c.resamplers.push_back(*kind);
      }
    }
    if (doc.contains("models")) {
      c.models.clear();
      for (const auto& m : doc["models"]) {
        const auto name = m.get<std::string>();
        auto kind = parse_model(name);
        c.models.push_back(kind ? std::string(to_string(*kind)) : name);
      }
    }
    c.k_filter = doc.value("k_filter", c.k_filter);
    c.k_smote = doc.value("k_smote", c.k_smote);
    c.alpha = doc.value("alpha", c.alpha);
    c.seed = doc.value("seed", c.seed);
    c.rf_trees = doc.value("rf_trees", c.rf_trees);
    if (doc.contains("out_dir")) c.out_dir = resolve(doc["out_dir"].get<std::string>());
    if (doc.contains("thresholds")) {
      const auto& t = doc["thresholds"];
      c.thresholds.pd = t.value("pd", c.thresholds.pd);
      c.thresholds.auc = t.value("auc", c.thresholds.auc);
      c.thresholds.g = t.value("g", c.thresholds.g);
      c.thresholds.pf = t.value("pf", c.thresholds.pf);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

std::string canonical_config(const ExperimentConfig& c) {
  json doc;
  for (const auto& t : c.targets) doc["targets"].push_back(t.stem().string());
  for (const auto& s : c.sources) doc["sources"].push_back(s.stem().string());
  for (auto r : c.resamplers) doc["resamplers"].push_back(std::string(to_string(r)));
  doc["models"] = c.models;
  doc["k_filter"] = c.k_filter;
  doc["k_smote"] = c.k_smote;
  doc["alpha"] = c.alpha;
  doc["seed"] = c.seed;
  doc["rf_trees"] = c.rf_trees;
  doc["thresholds"] = {{"pd", c.thresholds.pd},
                       {"auc", c.thresholds.auc},
                       {"g", c.thresholds.g},
                       {"pf", c.thresholds.pf}};
  return doc.dump();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return stable_hash(canonical_config(config));
}

std::uint64_t resample_seed(std::uint64_t master, const std::string& target, ResamplerKind kind) {
  return derive_seed(master, {target, to_string(kind)});
}

std::uint64_t run_seed(std::uint64_t master, const std::string& target, ResamplerKind kind,
                       const std::string& model) {
  return derive_seed(master, {target, to_string(kind), model});
}

PreparedTarget prepare_target(const SourcePool& raw_pool, const Standardizer& scaler,
                              const Dataset& raw_target, std::size_t k_filter, unsigned jobs) {
  SourcePool pool{scaler.apply(raw_pool.data), raw_pool.members, raw_pool.member_sizes};
  Dataset target = scaler.apply(raw_target);
  auto filtered = nn_filter(pool, target, FilterParams{k_filter}, jobs);
  return PreparedTarget{std::move(target), std::move(filtered)};
}

void assert_no_target_leak(const Dataset& train, const Dataset& target) {
  std::set<std::string> target_origins;
  for (const auto& o : target.origins()) target_origins.insert(o.dataset);
  for (const auto& o : train.origins()) {
    if (target_origins.contains(o.dataset)) {
      throw std::logic_error("training data for '" + target.name() +
                             "' contains an instance of the target dataset '" + o.dataset + "'");
    }
  }
}

void evaluate_models(const Dataset& train, const Dataset& target, ResamplerKind kind,
                     const std::vector<std::string>& models, const ModelParams& base,
                     std::uint64_t master_seed, std::vector<EvaluationRecord>& out,
                     std::vector<RunLogEntry>* log) {
  assert_no_target_leak(train, target);
  const auto truth = target.labels();
  for (const auto& model : models) {
    const auto started = std::chrono::steady_clock::now();
    EvaluationRecord record;
    record.target = target.name();
    record.model = model;
    record.resampler = std::string(to_string(kind));
    record.seed = run_seed(master_seed, target.name(), kind, model);
    ModelParams params = base;
    params.rf_seed = record.seed;
    try {
      const auto trained = cpdp::train(model, train, params);
      const auto scores = trained.predict_scores(target);
      evaluate_scores(record, scores, truth);
    } catch (const TrainingError& e) {
      record.flags.push_back(std::string("degenerate: ") + e.what());
    }
    if (log) {
      const auto elapsed = std::chrono::steady_clock::now() - started;
      log->push_back({record.target + "/" + record.resampler + "/" + model, record.flags,
                      std::chrono::duration<double, std::milli>(elapsed).count()});
    }
    out.push_back(std::move(record));
  }
}

Study load_study(const ExperimentConfig& config) {
  std::vector<Dataset> sources;
  std::set<std::string> source_projects;
  for (const auto& p : config.sources) {
    sources.push_back(load_dataset(p));
    source_projects.insert(project_of(sources.back().name()));
  }
  std::vector<Dataset> targets;
  for (const auto& p : config.targets) {
    targets.push_back(load_dataset(p));
    if (source_projects.contains(project_of(targets.back().name()))) {
      throw ConfigError("target '" + targets.back().name() +
                        "' belongs to a project that is also a source");
    }
  }
  SourcePool pool = merge_sources(sources);
  Standardizer scaler = Standardizer::fit(pool.data);
  return Study{std::move(targets), std::move(pool), std::move(scaler)};
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs) {
  config.validate();
  const Study study = load_study(config);
  const auto& targets = study.targets;
  std::vector<std::optional<PreparedTarget>> prepared(targets.size());
  parallel_for(targets.size(), jobs, [&](std::size_t t) {
    prepared[t] = prepare_target(study.pool, study.scaler, targets[t], config.k_filter);
  });

  ModelParams base;
  base.rf_trees = config.rf_trees;
  const std::size_t n_units = targets.size() * config.resamplers.size();
  struct Unit {
    std::vector<EvaluationRecord> records;
    std::vector<RunLogEntry> log;
  };
  std::vector<Unit> units(n_units);
  parallel_for(n_units, jobs, [&](std::size_t u) {
    const std::size_t t = u / config.resamplers.size();
    const ResamplerKind kind = config.resamplers[u % config.resamplers.size()];
    const auto& prep = *prepared[t];
    std::vector<std::string> notes;
    if (prep.filtered.k_clamped) notes.push_back("nn filter: k clamped to pool size");
    const auto treated =
        resample(prep.filtered.data, kind,
                 ResampleParams{config.k_smote, resample_seed(config.seed, prep.target.name(), kind)});
    notes.insert(notes.end(), treated.notes.begin(), treated.notes.end());
    evaluate_models(treated.data, prep.target, kind, config.models, base, config.seed,
                    units[u].records, &units[u].log);
    for (auto& entry : units[u].log) {
      entry.notes.insert(entry.notes.begin(), notes.begin(), notes.end());
    }
  });

  ExperimentResult result;
  result.log.config_hash = config_hash(config);
  result.log.seed = config.seed;
  for (auto& unit : units) {
    std::move(unit.records.begin(), unit.records.end(), std::back_inserter(result.records));
    std::move(unit.log.begin(), unit.log.end(), std::back_inserter(result.log.entries));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Analysis

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: no values");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<QuartileRow> quartile_summary(std::span<const EvaluationRecord> records) {
  std::vector<QuartileRow> rows;
  for (Measure m : kAllMeasures) {
    for (const auto& series : series_by_subject(records, m)) {
      QuartileRow row{series.subject.model, series.subject.resampler, m};
      std::vector<double> values;
      for (const auto& [_, v] : series.by_target) values.push_back(v);
      row.n = values.size();
      if (!values.empty()) {
        row.q25 = percentile(values, 0.25);
        row.median = percentile(values, 0.5);
        row.q75 = percentile(values, 0.75);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<PracticalRow> practical_success(std::span<const EvaluationRecord> records,
                                            const PracticalThresholds& thresholds) {
  std::vector<std::string> resamplers;
  for (const auto& r : records) {
    if (std::find(resamplers.begin(), resamplers.end(), r.resampler) == resamplers.end()) {
      resamplers.push_back(r.resampler);
    }
  }
  std::vector<PracticalRow> rows;
  for (const auto& resampler : resamplers) {
    for (Measure m : kAllMeasures) {
      PracticalRow row{resampler, m};
      for (const auto& r : records) {
        if (r.resampler != resampler) continue;
        const auto v = r.value(m);
        if (!v) continue;
        ++row.runs;
        bool ok = false;
        switch (m) {
          case Measure::pd: ok = *v > thresholds.pd; break;
          case Measure::auc: ok = *v > thresholds.auc; break;
          case Measure::g_measure: ok = *v > thresholds.g; break;
          case Measure::pf: ok = *v < thresholds.pf; break;
        }
        row.successes += ok;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<EffectCell> effect_grid(std::span<const EvaluationRecord> records, double alpha) {
  const std::string nos(to_string(ResamplerKind::nos));
  std::vector<EffectCell> cells;
  for (Measure m : kAllMeasures) {
    const auto series = series_by_subject(records, m);
    std::vector<std::string> models;
    for (const auto& s : series) {
      if (std::find(models.begin(), models.end(), s.subject.model) == models.end()) {
        models.push_back(s.subject.model);
      }
    }
    for (const auto& model : models) {
      auto reference = std::find_if(series.begin(), series.end(), [&](const SubjectSeries& s) {
        return s.subject.model == model && s.subject.resampler == nos;
      });
      if (reference == series.end()) continue;
      const std::size_t family_start = cells.size();
      std::vector<double> p_values;
      for (const auto& s : series) {
        if (s.subject.model != model || s.subject.resampler == nos) continue;
        EffectCell cell{model, s.subject.resampler, m, compare_subjects(s, *reference, m, alpha)};
        p_values.push_back(cell.comparison.test.p_value);
        cells.push_back(std::move(cell));
      }
      const auto adjusted = hochberg_adjust(p_values);
      for (std::size_t i = 0; i < adjusted.size(); ++i) {
        auto& cell = cells[family_start + i];
        cell.p_adjusted = adjusted[i];
        cell.outcome_adjusted =
            adjusted[i] < alpha && !cell.comparison.test.degenerate ? cell.comparison.outcome
                                                                     : Outcome::tie;
      }
    }
  }
  return cells;
}

Analysis analyze(std::span<const EvaluationRecord> records, double alpha,
                 const PracticalThresholds& thresholds) {
  Analysis a;
  a.quartiles = quartile_summary(records);
  for (Measure m : kAllMeasures) {
    const auto series = series_by_subject(records, m);
    a.win_tie_loss.push_back(win_tie_loss(series, m, alpha));
  }
  a.effects = effect_grid(records, alpha);
  a.practical = practical_success(records, thresholds);
  return a;
}

}  // namespace cpdp
