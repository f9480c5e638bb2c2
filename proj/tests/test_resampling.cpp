#include <gtest/gtest.h>

#include <numeric>

#include "cpdp/resampling.hpp"
#include "support/synthetic.hpp"

using namespace cpdp;

namespace {

std::size_t count_label(const Dataset& d, Label l) { return d.count(l); }

bool is_row_of(const Dataset& source, const Dataset& out, std::size_t out_row) {
  for (Eigen::Index i = 0; i < source.features().rows(); ++i) {
    if (source.features().row(i) == out.features().row(static_cast<Eigen::Index>(out_row)) &&
        source.origin(static_cast<std::size_t>(i)) == out.origin(out_row)) {
      return true;
    }
  }
  return false;
}

}  // namespace

TEST(Resampling, NamesRoundTrip) {
  for (auto k : kAllResamplers) EXPECT_EQ(parse_resampler(to_string(k)), k);
  EXPECT_EQ(parse_resampler("borderline-smote"), ResamplerKind::borderline_smote);
  EXPECT_FALSE(parse_resampler("nope"));
}

TEST(Resampling, RosBalancesThreeOfTen) {
  const auto d = fixture::make_gaussian(10, 3, 2, 1);
  const auto r = ros(d, 7);
  EXPECT_EQ(r.data.size(), 14u);
  EXPECT_EQ(count_label(r.data, Label::defective), 7u);
  EXPECT_EQ(r.n_synthetic(), 0u);
  for (std::size_t i = 0; i < r.data.size(); ++i) EXPECT_TRUE(is_row_of(d, r.data, i));
}

TEST(Resampling, RosTwentyRowsFromTenTenSplit) {
  // 3 defective of 13: the 10 clean are matched by 10 defective.
  const auto d = fixture::make_gaussian(13, 3, 2, 2);
  const auto r = ros(d, 7);
  EXPECT_EQ(r.data.size(), 20u);
  EXPECT_EQ(count_label(r.data, Label::defective), 10u);
}

TEST(Resampling, RusKeepsAllMinority) {
  const auto d = fixture::make_gaussian(50, 10, 3, 3);
  const auto r = rus(d, 4);
  EXPECT_EQ(r.data.size(), 20u);
  EXPECT_EQ(count_label(r.data, Label::clean), 10u);
  for (std::size_t i = 0; i < r.data.size(); ++i) EXPECT_TRUE(is_row_of(d, r.data, i));
}

TEST(Resampling, SmoteSyntheticsLieOnSegments) {
  const auto d = fixture::make_gaussian(60, 12, 4, 4);
  const auto r = smote(d, 5, 9);
  EXPECT_EQ(count_label(r.data, Label::defective), count_label(r.data, Label::clean));
  EXPECT_EQ(r.traces.size(), r.n_synthetic());
  for (const auto& t : r.traces) {
    const auto& x = r.data.features();
    const auto expected = x.row(t.a) + t.gap * (x.row(t.b) - x.row(t.a));
    EXPECT_LT((x.row(t.row) - expected).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GE(t.gap, 0.0);
    EXPECT_LT(t.gap, 1.0);
    EXPECT_EQ(r.data.label(t.a), Label::defective);
    EXPECT_EQ(r.data.label(t.b), Label::defective);
  }
}

TEST(Resampling, SmoteWithSingleMinorityFallsBack) {
  const auto d = fixture::make_gaussian(10, 1, 2, 5);
  const auto r = smote(d, 5, 1);
  EXPECT_EQ(r.data.size(), 18u);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Resampling, SmoteClampsK) {
  const auto d = fixture::make_gaussian(20, 3, 2, 6);
  const auto r = smote(d, 5, 1);
  EXPECT_EQ(count_label(r.data, Label::defective), 17u);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Resampling, MahakilFirstGenerationAreMidpoints) {
  const auto d = fixture::make_gaussian(80, 12, 3, 7);
  const auto r = mahakil(d, 3);
  EXPECT_EQ(count_label(r.data, Label::defective), count_label(r.data, Label::clean));
  ASSERT_FALSE(r.traces.empty());
  for (const auto& t : r.traces) {
    EXPECT_EQ(t.gap, 0.5);
    EXPECT_GE(t.generation, 1);
    if (t.generation == 1) {
      const auto& x = r.data.features();
      EXPECT_EQ(x.row(t.row), ((x.row(t.a) + x.row(t.b)) * 0.5).eval());
      EXPECT_FALSE(r.synthetic[t.a]);
      EXPECT_FALSE(r.synthetic[t.b]);
    }
  }
}

TEST(Resampling, MahakilTinyMinorityFallsBackToRos) {
  const auto d = fixture::make_gaussian(20, 3, 3, 8);
  const auto r = mahakil(d, 3);
  EXPECT_EQ(count_label(r.data, Label::defective), 17u);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Resampling, MajorityDefectiveGetsCleanSynthetics) {
  const auto d = fixture::make_gaussian(30, 22, 2, 9);
  const auto r = smote(d, 3, 2);
  EXPECT_EQ(count_label(r.data, Label::clean), 22u);
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    if (r.synthetic[i]) EXPECT_EQ(r.data.label(i), Label::clean);
  }
}

TEST(Resampling, TomekRemovesLinkedMajority) {
  FeatureMatrix x(5, 1);
  x << 0.0, 1.0, 1.1, 5.0, 6.0;
  // Links (1,2) and (3,4) go first; the second pass then links 0 with 2.
  Dataset d("t", "t", {"x"}, x, {0, 0, 1, 0, 1}, {{"t", 0}, {"t", 1}, {"t", 2}, {"t", 3}, {"t", 4}});
  const auto r = tomek_links(d);
  EXPECT_EQ(r.data.size(), 2u);
  EXPECT_TRUE(find_tomek_links(r.data, [&] {
                std::vector<std::size_t> rows(r.data.size());
                std::iota(rows.begin(), rows.end(), 0);
                return rows;
              }()).empty());
  EXPECT_EQ(count_label(r.data, Label::defective), 2u);
}

TEST(Resampling, OssKeepsMinorityAndShrinksMajority) {
  const auto d = fixture::make_gaussian(100, 15, 3, 10);
  const auto r = one_sided_selection(d, 2);
  EXPECT_EQ(count_label(r.data, Label::defective), 15u);
  EXPECT_LT(count_label(r.data, Label::clean), 85u);
  EXPECT_GE(count_label(r.data, Label::clean), 1u);
}

TEST(Resampling, NoMinorityLeavesDataUnchanged) {
  const auto d = fixture::make_gaussian(10, 0, 2, 11);
  const auto r = resample(d, ResamplerKind::smote, {5, 1});
  EXPECT_EQ(r.data.size(), 10u);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Resampling, SameSeedSameOutput) {
  const auto d = fixture::make_gaussian(70, 14, 4, 12);
  for (auto k : kAllResamplers) {
    const auto a = resample(d, k, {5, 99});
    const auto b = resample(d, k, {5, 99});
    EXPECT_EQ(a.data.features(), b.data.features()) << to_string(k);
    EXPECT_EQ(a.data.origins(), b.data.origins()) << to_string(k);
  }
}

TEST(Resampling, LargestRemainderSumsExactly) {
  const auto parts = largest_remainder({0.2, 0.3, 0.5}, 7);
  EXPECT_EQ(std::accumulate(parts.begin(), parts.end(), std::size_t{0}), 7u);
  EXPECT_EQ(parts, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(largest_remainder({1, 1, 1}, 2), (std::vector<std::size_t>{1, 1, 0}));
}

TEST(Resampling, SplitPicksSmallerClass) {
  const auto d = fixture::make_gaussian(10, 6, 2, 13);
  const auto s = split_classes(d);
  EXPECT_EQ(s.minority, Label::clean);
  EXPECT_EQ(s.minority_rows.size(), 4u);
}
