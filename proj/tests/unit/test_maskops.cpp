#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "grapeclose/error.hpp"
#include "grapeclose/maskops.hpp"
#include "oracles.hpp"

using namespace grapeclose;

TEST(MaskArea, Basics) {
  EXPECT_EQ(mask_area(BinaryMask(5, 5)), 0);
  EXPECT_EQ(mask_area(oracle::rect(5, 5, 0, 0, 5, 5)), 25);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto m = oracle::random_mask(rng, 13, 9, 0.3);
    std::int64_t n = 0;
    for (auto b : m.data()) n += b;
    EXPECT_EQ(mask_area(m), n);
  }
}

TEST(Percentile, MatchesNumpyMethods) {
  // numpy.percentile([1, 2, 4, 8, 16], 30, method=...)
  const std::vector<double> s{1, 2, 4, 8, 16};
  EXPECT_DOUBLE_EQ(percentile_sorted(s, 30, PercentileMethod::kLinear), 2.4);
  EXPECT_DOUBLE_EQ(percentile_sorted(s, 30, PercentileMethod::kLower), 2.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(s, 30, PercentileMethod::kHigher), 4.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(s, 30, PercentileMethod::kNearest), 2.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(s, 30, PercentileMethod::kMidpoint), 3.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(s, 100), 16.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(s, 0), 1.0);
  EXPECT_THROW(percentile_sorted({}, 50), ArgumentError);
  EXPECT_THROW(percentile_sorted(s, 101), ArgumentError);
  EXPECT_EQ(parse_percentile_method("midpoint"), PercentileMethod::kMidpoint);
  EXPECT_THROW(parse_percentile_method("hazen"), ArgumentError);
}

TEST(Iqr, IdenticalAreasAllKept) {
  const std::vector<std::int64_t> a(10, 42);
  EXPECT_EQ(iqr_keep_indices(a).size(), 10u);
}

TEST(Iqr, DropsTheLoneOutlier) {
  const std::vector<std::int64_t> a{10, 11, 12, 13, 14, 15, 16, 17, 18, 300000};
  const auto keep = iqr_keep_indices(a);
  std::vector<std::size_t> expect(9);
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(keep, expect);
}

TEST(Iqr, EmptyAndTiny) {
  EXPECT_TRUE(iqr_keep_indices({}).empty());
  EXPECT_EQ(iqr_keep_indices(std::vector<std::int64_t>{5}).size(), 1u);
  EXPECT_EQ(iqr_keep_indices(std::vector<std::int64_t>{1, 1000000}).size(), 2u);
  EXPECT_EQ(filter_masks_iqr(MaskSet{}).size(), 0u);
}

TEST(Iqr, RandomMatchesOracle) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lg(0.0, 6.0);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::int64_t> a(rng() % 120);
    for (auto& x : a) x = static_cast<std::int64_t>(std::pow(10.0, lg(rng)));
    EXPECT_EQ(iqr_keep_indices(a), oracle::iqr_filter(a));
  }
}

TEST(Iqr, ScaleCovariant) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> u(1, 400);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::int64_t> a(5 + rng() % 40), b;
    for (auto& x : a) x = u(rng);
    a.push_back(40000);
    for (auto x : a) b.push_back(x * 16);
    EXPECT_EQ(iqr_keep_indices(a), iqr_keep_indices(b));
  }
}

TEST(Iqr, FilterPreservesOrderAndIsSubsequence) {
  std::vector<BinaryMask> ms;
  const int sizes[] = {3, 4, 30, 3, 4, 5, 4, 3, 5, 4};
  for (int s : sizes) ms.push_back(oracle::rect(32, 32, 0, 0, s, s));
  const MaskSet set(ms);
  const auto out = filter_masks_iqr(set);
  ASSERT_EQ(out.size(), 9u);
  std::size_t j = 0;
  for (std::size_t i = 0; i < set.size() && j < out.size(); ++i)
    if (set[i] == out[j]) ++j;
  EXPECT_EQ(j, out.size());
}

TEST(MaskSet, RejectsMixedSizes) {
  EXPECT_THROW(MaskSet({BinaryMask(2, 2), BinaryMask(3, 2)}), ArgumentError);
}

TEST(Union, DisjointAndIdentical) {
  const auto a = oracle::rect(8, 8, 0, 0, 3, 1);
  const auto b = oracle::rect(8, 8, 0, 4, 3, 1);
  EXPECT_EQ(union_area(MaskSet({a, b})), 6);
  BinaryMask c(8, 8);
  for (int i = 0; i < 7; ++i) c.set(i, i);
  EXPECT_EQ(union_area(MaskSet({c, c})), 7);
  EXPECT_EQ(union_area(MaskSet{}), 0);
}

TEST(Union, RandomMatchesPerPixelOr) {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<BinaryMask> ms;
    for (int i = 0; i < 20; ++i) ms.push_back(oracle::random_mask(rng, 12, 12, 0.05));
    std::int64_t n = 0, total = 0;
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x) {
        bool any = false;
        for (const auto& m : ms) any = any || m.at(x, y);
        n += any;
      }
    for (const auto& m : ms) total += m.area();
    const MaskSet set(ms);
    EXPECT_EQ(union_area(set), n);
    EXPECT_LE(union_area(set), total);
  }
}

TEST(Iou, Basics) {
  const auto a = oracle::rect(6, 6, 0, 0, 3, 3);
  EXPECT_EQ(mask_iou(a, a), 1.0);
  EXPECT_EQ(mask_iou(a, oracle::rect(6, 6, 3, 3, 3, 3)), 0.0);
  EXPECT_EQ(mask_iou(BinaryMask(6, 6), BinaryMask(6, 6)), 0.0);
  EXPECT_THROW(mask_iou(a, BinaryMask(5, 6)), ArgumentError);
  std::mt19937_64 rng(15);
  for (int i = 0; i < 100; ++i) {
    const auto x = oracle::random_mask(rng, 10, 10, 0.4);
    const auto y = oracle::random_mask(rng, 10, 10, 0.4);
    EXPECT_DOUBLE_EQ(mask_iou(x, y), oracle::iou(x, y));
    EXPECT_EQ(mask_iou(x, y), mask_iou(y, x));
  }
}
