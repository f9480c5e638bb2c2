#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cpdp/harness.hpp"
#include "support/synthetic.hpp"

using namespace cpdp;
namespace fs = std::filesystem;

namespace {

EvaluationRecord record(const std::string& target, const std::string& model,
                        const std::string& resampler, double pd, double pf, double auc_value) {
  EvaluationRecord r{target, model, resampler, 1};
  r.pd = pd;
  r.pf = pf;
  r.g_measure = g_measure(pd, pf);
  r.auc = auc_value;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cpdp_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Harness, PercentileLinearInterpolation) {
  const std::vector<double> v{50, 10, 40, 20, 30};
  EXPECT_DOUBLE_EQ(percentile(v, 0.25), 20.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0.5), 30.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0.75), 40.0);
  EXPECT_DOUBLE_EQ(percentile({7.0}, 0.25), 7.0);
  EXPECT_DOUBLE_EQ(percentile({1.0, 2.0}, 0.5), 1.5);
}

TEST(Harness, PracticalSuccessUsesStrictThresholds) {
  std::vector<EvaluationRecord> rs;
  for (int i = 0; i < 4; ++i) rs.push_back(record("t" + std::to_string(i), "NB", "RUS", 80, 15.0, 75.0));
  const auto rows = practical_success(rs, {});
  for (const auto& row : rows) {
    EXPECT_EQ(row.runs, 4u);
    if (row.measure == Measure::pd) EXPECT_DOUBLE_EQ(row.rate(), 100.0);
    if (row.measure == Measure::pf) EXPECT_DOUBLE_EQ(row.rate(), 0.0);
    if (row.measure == Measure::auc) EXPECT_DOUBLE_EQ(row.rate(), 0.0);
  }
}

TEST(Harness, PracticalSuccessSkipsFlaggedValues) {
  std::vector<EvaluationRecord> rs{record("a", "NB", "NOS", 80, 10, 80)};
  EvaluationRecord flagged{"b", "NB", "NOS", 1};
  flagged.flags.push_back("degenerate: single class");
  rs.push_back(flagged);
  for (const auto& row : practical_success(rs, {})) EXPECT_EQ(row.runs, 1u);
}

TEST(Harness, ConfigParsesAndRejectsUnknownKeys) {
  const auto c = parse_config(
      R"({"targets":["t/a.csv"],"sources":["s/b.csv"],"resamplers":["nos","smote"],
          "models":["nb"],"seed":7,"rf_trees":100,"thresholds":{"pf":10}})",
      "/base");
  EXPECT_EQ(c.targets.front(), fs::path("/base/t/a.csv"));
  EXPECT_EQ(c.resamplers.size(), 2u);
  EXPECT_EQ(c.models.front(), "NB");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.thresholds.pf, 10.0);
  EXPECT_EQ(c.thresholds.pd, 75.0);
  EXPECT_THROW(parse_config(R"({"targets":["a"],"sources":["b"],"colour":1})", "."), ConfigError);
  EXPECT_THROW(parse_config(R"({"targets":[],"sources":["b"]})", "."), ConfigError);
  EXPECT_THROW(parse_config(R"({"targets":["a"],"sources":["b"],"models":["SVM"]})", "."),
               ConfigError);
  EXPECT_THROW(parse_config("{", "."), ConfigError);
}

TEST(Harness, SeedsAreStablePerRun) {
  EXPECT_EQ(run_seed(42, "arc", ResamplerKind::smote, "RF"),
            run_seed(42, "arc", ResamplerKind::smote, "RF"));
  EXPECT_NE(run_seed(42, "arc", ResamplerKind::smote, "RF"),
            run_seed(42, "arc", ResamplerKind::ros, "RF"));
  EXPECT_NE(resample_seed(42, "arc", ResamplerKind::smote), resample_seed(43, "arc", ResamplerKind::smote));
}

TEST(Harness, TargetLeakIsDetected) {
  const auto target = fixture::make_gaussian(10, 3, 2, 1, "arc");
  const auto train = fixture::make_gaussian(10, 3, 2, 2, "ant-1.3");
  EXPECT_NO_THROW(assert_no_target_leak(train, target));
  EXPECT_THROW(assert_no_target_leak(target, target), std::logic_error);
}

TEST(Harness, RunArithmeticAndOrder) {
  const auto dir = scratch("arith");
  const auto files = fixture::write_study(dir, 0.15, 3, 4, 5, 10);
  const auto config = load_config(files.config);
  const auto result = run_experiment(config);
  ASSERT_EQ(result.records.size(), 3u * 9u * 3u);
  EXPECT_EQ(result.records[0].target, "arc");
  EXPECT_EQ(result.records[0].resampler, "NOS");
  EXPECT_EQ(result.records[1].model, "KNN");
  EXPECT_EQ(result.records[3].resampler, "ROS");
  for (const auto& r : result.records) {
    if (r.pd && r.pf) EXPECT_NEAR(*r.g_measure, g_measure(*r.pd, *r.pf), 1e-9);
  }
}

TEST(Harness, AddingTreatmentKeepsExistingRuns) {
  const auto dir = scratch("stable");
  const auto files = fixture::write_study(dir, 0.15, 2, 3, 6, 10);
  auto config = load_config(files.config);
  config.resamplers = {ResamplerKind::nos, ResamplerKind::smote};
  const auto small = run_experiment(config);
  config.resamplers = {ResamplerKind::nos, ResamplerKind::ros, ResamplerKind::smote};
  const auto large = run_experiment(config);
  for (const auto& r : small.records) {
    auto it = std::find_if(large.records.begin(), large.records.end(), [&](const auto& o) {
      return o.target == r.target && o.model == r.model && o.resampler == r.resampler;
    });
    ASSERT_NE(it, large.records.end());
    EXPECT_EQ(it->seed, r.seed);
    EXPECT_EQ(it->auc, r.auc);
    EXPECT_EQ(it->pd, r.pd);
  }
}

TEST(Harness, ReportsIdenticalAcrossWorkerCounts) {
  const auto dir = scratch("jobs");
  const auto files = fixture::write_study(dir, 0.15, 3, 4, 7, 10);
  const auto config = load_config(files.config);
  emit_reports(run_experiment(config, 1), config, dir / "one");
  emit_reports(run_experiment(config, 4), config, dir / "four");
  for (const auto& entry : fs::directory_iterator(dir / "one")) {
    if (entry.path().filename() == "timing.json") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "four" / entry.path().filename()))
        << entry.path().filename();
  }
}

TEST(Harness, EmptyRecordsGiveHeadersOnly) {
  const auto dir = scratch("empty");
  ExperimentConfig config;
  ExperimentResult empty;
  EXPECT_FALSE(emit_reports(empty, config, dir));
  std::ifstream raw(dir / ReportFiles::raw);
  std::string header, next;
  std::getline(raw, header);
  EXPECT_EQ(header, "target,model,resampler,seed,pd,pf,g_measure,auc,flags");
  EXPECT_FALSE(std::getline(raw, next));
  EXPECT_TRUE(fs::exists(dir / ReportFiles::quartiles));
  EXPECT_TRUE(fs::exists(dir / ReportFiles::win_tie_loss(Measure::pf)));
}

TEST(Harness, RawCsvRoundTrip) {
  std::vector<EvaluationRecord> rs{record("arc", "NB", "NOS", 80, 10.123456789, 66.6666666)};
  EvaluationRecord flagged{"arc", "RF", "NOS", 99};
  flagged.flags = {"degenerate: one", "two, with comma"};
  rs.push_back(flagged);
  std::stringstream buf;
  write_raw_csv(rs, buf);
  const auto back = read_raw_csv(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_DOUBLE_EQ(*back[0].pf, 10.123457);
  EXPECT_EQ(back[1].seed, 99u);
  EXPECT_FALSE(back[1].pd);
  EXPECT_EQ(back[1].flags, flagged.flags);
}

TEST(Harness, EffectGridComparesAgainstNos) {
  std::vector<EvaluationRecord> rs;
  for (int t = 0; t < 6; ++t) {
    const auto name = "t" + std::to_string(t);
    rs.push_back(record(name, "NB", "NOS", 10 + t, 5, 60));
    rs.push_back(record(name, "NB", "RUS", 60 + t, 30, 61));
    rs.push_back(record(name, "NB", "ROS", 11 + t, 5, 60));
  }
  const auto cells = effect_grid(rs, 0.05);
  const auto it = std::find_if(cells.begin(), cells.end(), [](const EffectCell& c) {
    return c.resampler == "RUS" && c.measure == Measure::pd;
  });
  ASSERT_NE(it, cells.end());
  EXPECT_EQ(it->comparison.outcome, Outcome::win);
  EXPECT_EQ(it->comparison.effect.magnitude, EffectMagnitude::large);
  EXPECT_GE(it->p_adjusted, it->comparison.test.p_value);
}
