#include <gtest/gtest.h>

#include "cpdp/stats.hpp"

using namespace cpdp;

// Reference values computed with scipy.stats.brunnermunzel.
TEST(Stats, BrunnerMunzelMatchesReference) {
  const std::vector<double> x{1, 2, 1, 1, 1, 1, 1, 1, 1, 1, 2, 4, 1, 1};
  const std::vector<double> y{3, 3, 4, 3, 1, 2, 3, 1, 1, 5, 4};
  const auto r = brunner_munzel(x, y);
  EXPECT_NEAR(r.statistic, 3.1374674823029505, 1e-12);
  EXPECT_NEAR(r.p_value, 0.0057862086661514675, 1e-10);
  EXPECT_FALSE(r.degenerate);
}

TEST(Stats, BrunnerMunzelMoreReferences) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{3, 4, 5, 6, 7, 8};
  auto r = brunner_munzel(a, b);
  EXPECT_NEAR(r.statistic, 2.990858282453397, 1e-12);
  EXPECT_NEAR(r.p_value, 0.01524974892212487, 1e-10);
  const std::vector<double> c{0.3, 0.1, 0.9, 0.5}, d{0.35, 0.8, 0.7, 0.95, 0.6};
  r = brunner_munzel(c, d);
  EXPECT_NEAR(r.statistic, 1.2186666955535812, 1e-12);
  EXPECT_NEAR(r.p_value, 0.28922963006388785, 1e-10);
}

TEST(Stats, BrunnerMunzelRelativeEffectIsPairCount) {
  const std::vector<double> x{1, 2, 2, 5}, y{2, 3, 4};
  double count = 0;
  for (double a : x)
    for (double b : y) count += a < b ? 1.0 : a == b ? 0.5 : 0.0;
  EXPECT_DOUBLE_EQ(brunner_munzel(x, y).relative_effect, count / 12.0);
}

TEST(Stats, CompleteSeparationIsSignificant) {
  const std::vector<double> x{1, 2, 3}, y{10, 11, 12};
  const auto r = brunner_munzel(x, y);
  EXPECT_EQ(r.relative_effect, 1.0);
  EXPECT_LT(r.p_value, 0.05);
  EXPECT_FALSE(r.degenerate);
}

TEST(Stats, IdenticalConstantSamplesAreDegenerate) {
  const std::vector<double> x{4, 4, 4}, y{4, 4, 4, 4};
  const auto r = brunner_munzel(x, y);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Stats, BrunnerMunzelNeedsTwoValues) {
  const std::vector<double> x{1}, y{1, 2};
  EXPECT_THROW(brunner_munzel(x, y), std::invalid_argument);
}

TEST(Stats, CliffsDeltaExample) {
  const std::vector<double> x{1, 2, 3}, y{2, 3, 4};
  const auto r = cliffs_delta(x, y);
  EXPECT_NEAR(r.delta, -5.0 / 9.0, 1e-15);
  EXPECT_EQ(r.magnitude, EffectMagnitude::large);
}

TEST(Stats, MagnitudeBoundaries) {
  EXPECT_EQ(effect_magnitude(0.111), EffectMagnitude::negligible);
  EXPECT_EQ(effect_magnitude(0.112), EffectMagnitude::negligible);
  EXPECT_EQ(effect_magnitude(0.1121), EffectMagnitude::medium);
  EXPECT_EQ(effect_magnitude(-0.427), EffectMagnitude::medium);
  EXPECT_EQ(effect_magnitude(0.428), EffectMagnitude::large);
}

TEST(Stats, HochbergStepUp) {
  const std::vector<double> p{0.01, 0.04, 0.03};
  const auto adj = hochberg_adjust(p);
  EXPECT_NEAR(adj[0], 0.03, 1e-15);
  EXPECT_NEAR(adj[1], 0.04, 1e-15);
  EXPECT_NEAR(adj[2], 0.04, 1e-15);
}

TEST(Stats, HochbergClipsAtOne) {
  const std::vector<double> p{0.6, 0.7};
  const auto adj = hochberg_adjust(p);
  EXPECT_EQ(adj[0], 0.7);
  EXPECT_EQ(adj[1], 0.7);
}

namespace {
SubjectSeries series(const std::string& model, const std::string& resampler,
                     const std::vector<double>& values) {
  SubjectSeries s{{model, resampler}, {}};
  for (std::size_t i = 0; i < values.size(); ++i) s.by_target["t" + std::to_string(i)] = values[i];
  return s;
}
}  // namespace

TEST(Stats, ComparisonDirectionFollowsMeasure) {
  const auto low = series("NB", "NOS", {1, 2, 3, 4, 5, 6});
  const auto high = series("NB", "RUS", {20, 21, 22, 23, 24, 25});
  EXPECT_EQ(compare_subjects(high, low, Measure::pd, 0.05).outcome, Outcome::win);
  EXPECT_EQ(compare_subjects(high, low, Measure::pf, 0.05).outcome, Outcome::loss);
}

TEST(Stats, IdenticalSeriesTie) {
  const auto a = series("NB", "NOS", {1, 5, 3, 4});
  const auto b = series("KNN", "NOS", {1, 5, 3, 4});
  const auto cell = compare_subjects(a, b, Measure::auc, 0.05);
  EXPECT_EQ(cell.outcome, Outcome::tie);
}

TEST(Stats, TooFewCommonTargetsIsTie) {
  const auto a = series("NB", "NOS", {1});
  const auto b = series("NB", "ROS", {9});
  const auto cell = compare_subjects(a, b, Measure::auc, 0.05);
  EXPECT_EQ(cell.outcome, Outcome::tie);
  EXPECT_FALSE(cell.note.empty());
}

TEST(Stats, WinTieLossRowsSumToOpponents) {
  std::vector<SubjectSeries> s{series("NB", "NOS", {1, 2, 3, 4, 5}),
                               series("NB", "ROS", {10, 11, 12, 13, 14}),
                               series("NB", "RUS", {20, 21, 22, 23, 24}),
                               series("KNN", "NOS", {1, 2, 3, 4, 5})};
  const auto table = win_tie_loss(s, Measure::pd);
  ASSERT_EQ(table.rows.size(), 4u);
  for (const auto& row : table.rows) EXPECT_EQ(row.wins + row.ties + row.losses, 3u);
  EXPECT_EQ(table.rows.front().subject, (Subject{"NB", "RUS"}));
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    EXPECT_GE(table.rows[i - 1].wins_minus_losses(), table.rows[i].wins_minus_losses());
  }
}
