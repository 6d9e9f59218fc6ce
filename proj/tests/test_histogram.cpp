#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "rankcal/errors.hpp"
#include "rankcal/histogram.hpp"
#include "rankcal/random.hpp"

using namespace rankcal;

TEST(Histogram, AccumulateSmall) {
  const std::vector<int> ranks = {1, 1, 2};
  const auto h = accumulate_histogram(ranks, 2);
  EXPECT_EQ(h.count(1), 2u);
  EXPECT_EQ(h.count(2), 1u);
  EXPECT_EQ(h.n_cases(), 3u);
}

TEST(Histogram, EmptySequence) {
  const auto h = accumulate_histogram({}, 20);
  EXPECT_EQ(h.m(), 20u);
  EXPECT_EQ(h.n_cases(), 0u);
  for (auto c : h.counts()) EXPECT_EQ(c, 0u);
  EXPECT_THROW(histogram_summary(h), EmptyHistogram);
}

TEST(Histogram, RankOutOfRange) {
  RankHistogram h(4);
  EXPECT_THROW(h.add(0), InvalidInput);
  EXPECT_THROW(h.add(5), InvalidInput);
  const std::vector<int> bad = {1, 9};
  EXPECT_THROW(accumulate_histogram(bad, 4), InvalidInput);
}

TEST(Histogram, UniformDrawsConcentrate) {
  RandomSource r(12, 0);
  std::vector<int> ranks(10000);
  for (auto& x : ranks) x = static_cast<int>(r.uniform_index(20)) + 1;
  const auto h = accumulate_histogram(ranks, 20);
  for (auto c : h.counts()) {
    EXPECT_GE(c, 400u);
    EXPECT_LE(c, 600u);
  }
  const auto total = std::accumulate(h.counts().begin(), h.counts().end(), std::uint64_t{0});
  EXPECT_EQ(total, h.n_cases());
}

TEST(Histogram, SummaryExactUniform) {
  const std::vector<int> ranks = {1, 2, 3, 4};
  const auto s = histogram_summary(accumulate_histogram(ranks, 4));
  EXPECT_DOUBLE_EQ(s.mean_rank, 2.5);
  EXPECT_DOUBLE_EQ(s.rank_variance, 1.25);
  EXPECT_DOUBLE_EQ(s.chi_square, 0.0);
}

TEST(Histogram, SummaryPointMass) {
  const std::vector<int> ranks = {1, 1, 1};
  const auto s = histogram_summary(accumulate_histogram(ranks, 4));
  EXPECT_DOUBLE_EQ(s.mean_rank, 1.0);
  EXPECT_DOUBLE_EQ(s.rank_variance, 0.0);
  // E = 0.75: (2.25^2 + 3 * 0.75^2) / 0.75
  EXPECT_DOUBLE_EQ(s.chi_square, 9.0);
}

TEST(Histogram, MergeAddsCounts) {
  RankHistogram a(3), b(3);
  a.add(1);
  b.add(3);
  b.add(3);
  a.merge(b);
  EXPECT_EQ(a.count(1), 1u);
  EXPECT_EQ(a.count(3), 2u);
  EXPECT_EQ(a.n_cases(), 3u);
  EXPECT_THROW(a.merge(RankHistogram(4)), InvalidInput);
}
