#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gmx/errors.hpp"
#include "gmx/extremes.hpp"
#include "gmx/rng.hpp"

using namespace gmx;

namespace {

using Eps = std::vector<std::uint8_t>;

double normal_sf(double u) { return 0.5 * std::erfc(u / std::sqrt(2.0)); }

}  // namespace

TEST(Levels, KnownValues) {
  EXPECT_NEAR(level(100, 0.0), 2.3662547929063944, 1e-12);
  EXPECT_NEAR(level(100, 1.0) - level(100, 0.0), 0.3295051144911304, 1e-12);
  const auto lp = LevelParams::make(1000);
  EXPECT_EQ(lp.level(0.0), lp.b_n);
  EXPECT_GT(lp.a_n, 0.0);
  EXPECT_THROW(level(2, 0.0), InvalidParameter);
}

TEST(Levels, TransformedLevel) {
  for (double z : {-2.0, 0.0, 3.0}) {
    EXPECT_EQ(transformed_level(500, 0.7, z, 0.0), level(500, 0.7));
  }
  EXPECT_NEAR(transformed_level(100, 0.0, 0.0, 1.0), 2.6743698245869214, 1e-12);
  EXPECT_THROW(transformed_level(100, 0.0, 0.0, std::log(100.0)), InvalidParameter);
  EXPECT_THROW(transformed_level(100, 0.0, 0.0, -1.0), InvalidParameter);
}

TEST(Levels, TailApproximatesIntensity) {
  // n (1 - Phi(u_n(0, 1))) vs g(0, 1) = exp(-1 + sqrt 2) at gamma = 1.
  const double g = std::exp(-1.0 + std::sqrt(2.0));
  const double n = 1e6;
  const double gap = std::abs(n * normal_sf(transformed_level(1000000, 0.0, 1.0, 1.0)) / g - 1.0);
  EXPECT_LT(gap, 0.01);
  // The pre-build sweep gives 4.8e-4 here and shrinking gaps along n.
  const double gap4 = std::abs(1e4 * normal_sf(transformed_level(10000, 0.0, 1.0, 1.0)) / g - 1.0);
  EXPECT_GT(gap4, gap);
}

TEST(IntervalFamily, ValidationAndMeasure) {
  EXPECT_THROW(IntervalFamily({{0.5, 0.4}}), InvalidParameter);
  EXPECT_THROW(IntervalFamily({{-0.1, 0.4}}), InvalidParameter);
  EXPECT_THROW(IntervalFamily({{0.1, 1.1}}), InvalidParameter);
  EXPECT_THROW(IntervalFamily({{0.1, 0.5}, {0.4, 0.6}}), InvalidParameter);
  EXPECT_THROW(IntervalFamily(std::vector<Interval>{}), InvalidParameter);
  const IntervalFamily f({{0.6, 0.9}, {0.1, 0.4}});
  EXPECT_DOUBLE_EQ(f.measure(), 0.6);
  EXPECT_EQ(f.intervals().front().lower, 0.1);
  EXPECT_NO_THROW(IntervalFamily({{0.1, 0.5}, {0.5, 0.6}}));
}

TEST(IntervalFamily, LatticeMembership) {
  const IntervalFamily half({{0.0, 0.5}});
  const auto [b, e] = half.index_range(4, 0);
  EXPECT_EQ(b, 0u);
  EXPECT_EQ(e, 2u);
  EXPECT_TRUE(half.contains(4, 1));
  EXPECT_TRUE(half.contains(4, 2));
  EXPECT_FALSE(half.contains(4, 3));
  EXPECT_EQ(lattice_floor(100, 0.29), 29u);
  EXPECT_EQ(lattice_floor(10, 0.7), 7u);
}

TEST(ExtendedReal, Ordering) {
  const auto ninf = ExtendedReal::minus_infinity();
  EXPECT_TRUE(ninf < ExtendedReal(-1e300));
  EXPECT_TRUE(ninf <= -1e308);
  EXPECT_TRUE(ExtendedReal(1.0) < ExtendedReal(2.0));
  EXPECT_TRUE(ExtendedReal().is_minus_infinity());
}

TEST(KthMaximum, Enumeration) {
  const std::vector<double> path{3, 1, 2};
  EXPECT_EQ(kth_maximum(path, Eps{1, 1, 0}, ObsClass::observed, 2).value(), 1.0);
  EXPECT_TRUE(kth_maximum(path, Eps{1, 1, 1}, ObsClass::missed, 1).is_minus_infinity());
  EXPECT_EQ(kth_maximum(path, Eps{0, 1, 0}, ObsClass::all, 1).value(), 3.0);
  EXPECT_EQ(kth_maximum(path, Eps{0, 1, 0}, ObsClass::missed, 2).value(), 2.0);
  EXPECT_TRUE(kth_maximum(path, Eps{0, 1, 0}, ObsClass::observed, 2).is_minus_infinity());
}

TEST(KthMaximum, StrictThresholdRule) {
  const std::vector<double> path{3, 1, 2, 5};
  const Eps eps{1, 1, 0, 0};
  // Two observed values: the k = 2 order statistic exists under >= k only.
  EXPECT_EQ(kth_maximum(path, eps, ObsClass::observed, 2).value(), 1.0);
  EXPECT_TRUE(kth_maximum(path, eps, ObsClass::observed, 2, OrderStatThreshold::more_than_k)
                  .is_minus_infinity());
  EXPECT_EQ(kth_maximum(path, eps, ObsClass::observed, 1, OrderStatThreshold::more_than_k).value(),
            3.0);
  // Two missed values: the literal rule needs sum eps < n - l.
  EXPECT_TRUE(kth_maximum(path, eps, ObsClass::missed, 2, OrderStatThreshold::more_than_k)
                  .is_minus_infinity());
  EXPECT_EQ(kth_maximum(path, eps, ObsClass::all, 4, OrderStatThreshold::more_than_k).value(), 1.0);
}

TEST(MaxLocation, Enumeration) {
  const std::vector<double> path{3, 1, 2};
  EXPECT_EQ(max_location(path, Eps{1, 1, 0}, ObsClass::observed), 1u);
  EXPECT_EQ(max_location(path, Eps{0, 1, 1}, ObsClass::observed), 3u);
  EXPECT_FALSE(max_location(path, Eps{0, 0, 0}, ObsClass::observed).has_value());
  EXPECT_EQ(max_location(std::vector<double>{2, 5, 5}, Eps{1, 1, 1}, ObsClass::all), 2u);
}

TEST(ExceedanceCounts, Examples) {
  const std::vector<double> low(4, -10.0);
  const std::vector<double> levels{0.0, 1.0};
  const std::vector<IntervalFamily> fams{IntervalFamily::unit()};
  const auto none = exceedance_counts(low, Eps{1, 0, 1, 0}, levels, fams);
  for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(none.all(l, 0), 0u);

  // n = 4, B = (0, 0.5] takes indices 1 and 2 only.
  const std::vector<double> high(4, 10.0);
  const std::vector<IntervalFamily> half{IntervalFamily({{0.0, 0.5}})};
  const auto rec = exceedance_counts(high, Eps{1, 0, 1, 1}, std::vector<double>{0.0}, half);
  EXPECT_EQ(rec.observed(0, 0), 1u);
  EXPECT_EQ(rec.missed(0, 0), 1u);

  EXPECT_THROW(exceedance_counts(high, Eps{1, 0}, levels, fams), InvalidParameter);
}

TEST(ExceedanceCounts, RandomPathProperties) {
  const std::size_t n = 2000;
  Stream s(55);
  std::vector<double> path(n);
  Eps eps(n);
  for (std::size_t j = 0; j < n; ++j) {
    path[j] = s.normal() + 1.5;
    eps[j] = s.bernoulli(0.4);
  }
  const std::vector<double> levels{-1.0, 0.0, 0.5, 2.0};
  const IntervalFamily a({{0.0, 0.3}});
  const IntervalFamily b({{0.55, 0.8}});
  const IntervalFamily ab({{0.0, 0.3}, {0.55, 0.8}});
  const std::vector<IntervalFamily> fams{a, b, ab, IntervalFamily::unit()};
  const auto rec = exceedance_counts(path, eps, levels, fams);
  const LevelParams lp = LevelParams::make(n);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    for (std::size_t f = 0; f < fams.size(); ++f) {
      EXPECT_EQ(rec.all(l, f), rec.observed(l, f) + rec.missed(l, f));
      std::uint64_t brute_obs = 0, brute_mis = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (!fams[f].contains(n, j) || !(path[j - 1] > lp.level(levels[l]))) continue;
        (eps[j - 1] ? brute_obs : brute_mis) += 1;
      }
      EXPECT_EQ(rec.observed(l, f), brute_obs);
      EXPECT_EQ(rec.missed(l, f), brute_mis);
      if (l > 0) {
        EXPECT_LE(rec.observed(l, f), rec.observed(l - 1, f));
        EXPECT_LE(rec.missed(l, f), rec.missed(l - 1, f));
      }
    }
    EXPECT_EQ(rec.observed(l, 2), rec.observed(l, 0) + rec.observed(l, 1));
    EXPECT_EQ(rec.missed(l, 2), rec.missed(l, 0) + rec.missed(l, 1));
  }
}

TEST(ExceedanceCounts, DualityWithOrderStatistics) {
  const std::size_t n = 500;
  Stream s(66);
  std::vector<double> path(n);
  Eps eps(n);
  for (std::size_t j = 0; j < n; ++j) {
    path[j] = s.normal() + 2.0;
    eps[j] = s.bernoulli(0.5);
  }
  const LevelParams lp = LevelParams::make(n);
  const std::vector<IntervalFamily> fams{IntervalFamily::unit()};
  for (double x : {-2.0, 0.0, 1.0, 3.0}) {
    const auto rec = exceedance_counts(path, eps, std::vector<double>{x}, fams);
    for (ObsClass c : {ObsClass::observed, ObsClass::missed, ObsClass::all}) {
      for (std::size_t k = 1; k <= 6; ++k) {
        const bool by_max = kth_maximum(path, eps, c, k) <= lp.level(x);
        const bool by_count = rec.count(c, 0, 0) <= k - 1;
        EXPECT_EQ(by_max, by_count) << to_string(c) << " k=" << k << " x=" << x;
      }
    }
  }
}

TEST(Summary, MatchesSeparateQueries) {
  Stream s(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + trial % 17;
    std::vector<double> path(n);
    Eps eps(n);
    for (std::size_t j = 0; j < n; ++j) {
      // Coarse values force ties.
      path[j] = std::round(s.normal() * 2.0);
      eps[j] = s.bernoulli(0.5);
    }
    const auto sum = summarize_maxima(path, eps);
    for (ObsClass c : {ObsClass::observed, ObsClass::missed, ObsClass::all}) {
      EXPECT_EQ(sum.maximum(c), kth_maximum(path, eps, c, 1));
      EXPECT_EQ(sum.location(c), max_location(path, eps, c));
    }
    // The overall location follows the larger class maximum, smallest index
    // on ties.
    if (sum.observed_location && sum.missed_location) {
      const auto expected = sum.observed > sum.missed ? sum.observed_location
                            : sum.missed > sum.observed
                                ? sum.missed_location
                                : std::min(sum.observed_location, sum.missed_location);
      EXPECT_EQ(sum.all_location, expected);
    }
  }
}

TEST(ObsClass, Parsing) {
  EXPECT_EQ(parse_obs_class("observed"), ObsClass::observed);
  EXPECT_EQ(parse_obs_class("missed"), ObsClass::missed);
  EXPECT_EQ(parse_obs_class("all"), ObsClass::all);
  EXPECT_FALSE(parse_obs_class("both").has_value());
}
