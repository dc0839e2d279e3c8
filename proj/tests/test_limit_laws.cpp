#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "gmx/errors.hpp"
#include "gmx/limit_laws.hpp"

using namespace gmx;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
const double e1 = std::exp(-1.0);

LimitLaws laws(double gamma, LambdaLaw law) { return LimitLaws({gamma, std::move(law)}); }

double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

}  // namespace

TEST(Intensity, Values) {
  EXPECT_EQ(g_intensity(0.0, 0.0, 3.7), 1.0);
  EXPECT_NEAR(g_intensity(1.0, 0.0, 0.0), e1, 1e-16);
  EXPECT_EQ(g_intensity(1.0, inf, 0.0), 0.0);
  EXPECT_EQ(g_intensity(1.0, 2000.0, 0.0), 0.0);
}

TEST(Intensity, NormalizationGrid) {
  for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
    const NormalQuadrature q(gamma);
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      const double v = q.integrate([&](double z) { return g_intensity(gamma, x, z); });
      EXPECT_LT(std::abs(v - std::exp(-x)), 1e-10) << gamma << " " << x;
    }
  }
}

TEST(Poisson, Helpers) {
  EXPECT_EQ(log_power_over_factorial(0.0, 0), 0.0);
  EXPECT_EQ(log_power_over_factorial(0.0, 3), -inf);
  EXPECT_NEAR(log_factorial(10), std::log(3628800.0), 1e-12);
  EXPECT_NEAR(log_factorial(5000), std::lgamma(5001.0), 1e-9);
  EXPECT_NEAR(poisson_pmf(2, 1.5), 1.125 * std::exp(-1.5), 1e-16);
  EXPECT_EQ(poisson_pmf(0, 0.0), 1.0);
}

TEST(JointMaxima, ClosedForms) {
  EXPECT_NEAR(laws(0, LambdaLaw::point(0.5)).joint_maxima_cdf(0, 0), e1, 1e-14);
  EXPECT_NEAR(laws(0, LambdaLaw::uniform(0, 1)).joint_maxima_cdf(0, inf), 1 - e1, 1e-14);
  EXPECT_NEAR(laws(1, LambdaLaw::point(0.5)).joint_maxima_cdf(0, 0.5), 0.6518820932757795, 1e-12);
  EXPECT_EQ(laws(1, LambdaLaw::beta(2, 2)).joint_maxima_cdf(inf, inf), 1.0);
}

TEST(JointMaxima, MatchesPinnedMonteCarlo) {
  // 10^7-draw Monte Carlo over xi of exp(-exp(-1 + sqrt 2 xi)).
  const double mc = 0.6083466808209579;
  const double se = 9.539221635027169e-05;
  const double v = laws(1, LambdaLaw::point(1)).joint_maxima_cdf(0, inf);
  EXPECT_LT(std::abs(v - mc), 4 * se);
}

TEST(JointMaxima, IndependentCaseReduction) {
  for (double p : {0.0, 0.3, 1.0}) {
    for (auto [x, y] : {std::pair{0.0, 0.0}, {-1.0, 2.0}, {1.5, -0.5}}) {
      const double expected = std::exp(-p * std::exp(-x) - (1 - p) * std::exp(-y));
      EXPECT_NEAR(laws(0, LambdaLaw::point(p)).joint_maxima_cdf(x, y), expected, 1e-12);
    }
  }
}

TEST(JointMaxima, MonotoneAndBounded) {
  const auto L = laws(1.0, LambdaLaw::uniform(0, 1));
  double prev = 0.0;
  for (double x = -3; x <= 6; x += 0.5) {
    const double v = L.joint_maxima_cdf(x, 0.3);
    EXPECT_GE(v, prev - 1e-15);
    EXPECT_LE(v, 1.0);
    prev = v;
  }
  EXPECT_NEAR(L.joint_maxima_cdf(40, 40), 1.0, 1e-8);
}

TEST(OrderStats, Examples) {
  const auto one = laws(0, LambdaLaw::point(1));
  EXPECT_NEAR(one.order_stats_obs_missed_cdf(2, 1, 0, -3.0), 2 * e1, 1e-14);
  EXPECT_NEAR(one.order_stats_obs_missed_cdf(2, 1, 0, 4.0), 2 * e1, 1e-14);
  const auto beta = laws(0.5, LambdaLaw::beta(2, 2));
  EXPECT_EQ(beta.order_stats_obs_missed_cdf(1, 1, 0.2, 0.7), beta.joint_maxima_cdf(0.2, 0.7));
  EXPECT_NEAR(one.order_stats_vs_all_cdf(ObsClass::observed, 1, 1, 0, 5), e1, 1e-14);
  EXPECT_THROW(one.order_stats_obs_missed_cdf(0, 1, 0, 0), InvalidParameter);
  EXPECT_THROW(one.order_stats_vs_all_cdf(ObsClass::all, 1, 1, 0, 0), InvalidParameter);
}

TEST(OrderStats, MonotoneInRanks) {
  const auto L = laws(1.0, LambdaLaw::beta(2, 3));
  double prev = 0.0;
  for (std::size_t k = 1; k <= 8; ++k) {
    const double v = L.order_stats_obs_missed_cdf(k, 2, 0.0, 0.5);
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = 0.0;
  for (std::size_t m = 1; m <= 6; ++m) {
    const double v = L.order_stats_vs_all_cdf(ObsClass::missed, 2, m, -0.5, 0.5);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
  EXPECT_NEAR(L.order_stats_obs_missed_cdf(60, 60, 3.0, 3.0), 1.0, 1e-8);
}

TEST(OrderStats, BranchesAgreeOnDiagonal) {
  const auto L = laws(1.0, LambdaLaw::uniform(0, 1));
  for (ObsClass c : {ObsClass::observed, ObsClass::missed}) {
    const double on = L.order_stats_vs_all_cdf(c, 2, 3, 0.3, 0.3);
    const double below = L.order_stats_vs_all_cdf(c, 2, 3, 0.3, std::nextafter(0.3, 1.0));
    const double above = L.order_stats_vs_all_cdf(c, 2, 3, std::nextafter(0.3, 1.0), 0.3);
    EXPECT_NEAR(on, below, 1e-10);
    EXPECT_NEAR(on, above, 1e-10);
  }
}

TEST(OrderStats, VsAllReducesToObsMissedWhenRanksAreOne) {
  // With k = m = 1 and x <= y the event is {M~ <= x, M^ <= y}.
  const auto L = laws(0.5, LambdaLaw::beta(2, 2));
  EXPECT_NEAR(L.order_stats_vs_all_cdf(ObsClass::observed, 1, 1, -0.2, 0.6),
              L.joint_maxima_cdf(-0.2, 0.6), 1e-12);
  EXPECT_NEAR(L.order_stats_vs_all_cdf(ObsClass::missed, 1, 1, -0.2, 0.6),
              L.joint_maxima_cdf(0.6, -0.2), 1e-12);
  // With x >= y the observed constraint is implied by the overall one.
  EXPECT_NEAR(L.order_stats_vs_all_cdf(ObsClass::observed, 1, 1, 0.9, 0.1),
              L.joint_maxima_cdf(0.1, 0.1), 1e-12);
}

TEST(Symmetry, MissedIsObservedUnderReflectedLaw) {
  // The reflected law has its own lambda rule, so agreement is up to the
  // quadrature tolerance.
  for (const LambdaLaw& law :
       {LambdaLaw::beta(2.0, 5.0), LambdaLaw::discrete({0.2, 0.9}, {0.3, 0.7})}) {
    const auto L = laws(0.7, law);
    const auto R = laws(0.7, law.reflected());
    EXPECT_NEAR(L.order_stats_obs_missed_cdf(2, 3, 0.1, 0.6),
                R.order_stats_obs_missed_cdf(3, 2, 0.6, 0.1), 1e-10);
    EXPECT_NEAR(L.order_stats_vs_all_cdf(ObsClass::missed, 2, 3, -0.4, 0.5),
                R.order_stats_vs_all_cdf(ObsClass::observed, 2, 3, -0.4, 0.5), 1e-10);
    EXPECT_NEAR(L.order_stats_vs_all_cdf(ObsClass::missed, 2, 2, 0.5, -0.4),
                R.order_stats_vs_all_cdf(ObsClass::observed, 2, 2, 0.5, -0.4), 1e-10);
    EXPECT_NEAR(L.joint_counts_pmf(0.7, 1, 0, 1, 0, 2, 1), R.joint_counts_pmf(0.7, 1, 0, 0, 1, 1, 2),
                1e-10);
    EXPECT_NEAR(L.locations_heights_cdf(LocationPair::missed_all, 0.4, 0.7, 0.0, 0.5),
                R.locations_heights_cdf(LocationPair::obs_all, 0.4, 0.7, 0.0, 0.5), 1e-10);
    EXPECT_EQ(locations_cdf(law, LocationPair::missed_all, 0.3, 0.8),
              locations_cdf(law.reflected(), LocationPair::obs_all, 0.3, 0.8));
  }
}

TEST(JointCounts, Examples) {
  EXPECT_NEAR(laws(0, LambdaLaw::point(1)).joint_counts_pmf(1, 0, 0, 0, 0, 0, 0), e1, 1e-14);
  const auto L = laws(0.5, LambdaLaw::uniform(0, 1));
  EXPECT_EQ(L.joint_counts_pmf(0.5, 1, 0, 3, 0, 2, 1), 0.0);
  EXPECT_EQ(L.joint_counts_pmf(0.5, 1, 0, 0, 2, 0, 1), 0.0);
  EXPECT_EQ(L.joint_counts_pmf(0.5, 0, 1, 1, 0, 2, 0), 0.0);
  EXPECT_EQ(L.joint_counts_pmf(0.5, 0.3, 0.3, 1, 0, 2, 0), 0.0);
  EXPECT_GT(L.joint_counts_pmf(0.5, 1, 0, 1, 0, 2, 1), 0.0);
  EXPECT_THROW(L.joint_counts_pmf(0.0, 1, 0, 0, 0, 0, 0), InvalidParameter);
}

TEST(JointCounts, SumsToOneWithoutDependence) {
  const auto L = laws(0.0, LambdaLaw::point(0.4));
  double total = 0.0;
  const std::uint64_t K = 14;
  for (std::uint64_t k3 = 0; k3 <= K; ++k3) {
    for (std::uint64_t k4 = 0; k3 + k4 <= K; ++k4) {
      for (std::uint64_t k1 = 0; k1 <= k3; ++k1) {
        for (std::uint64_t k2 = 0; k2 <= k4; ++k2) {
          total += L.joint_counts_pmf(0.5, 1.0, 0.0, k1, k2, k3, k4);
        }
      }
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(JointCounts, TruncatedSumMatchesTruncatedMass) {
  // Under dependence the lognormal mixing has a heavy upper tail, so the sum
  // over k3 + k4 <= K is compared with P(N^y(B) <= K) computed directly.
  const auto L = laws(0.5, LambdaLaw::beta(2, 2));
  const double mB = 0.5;
  const std::uint64_t K = 10;
  double total = 0.0;
  for (std::uint64_t k3 = 0; k3 <= K; ++k3) {
    for (std::uint64_t k4 = 0; k3 + k4 <= K; ++k4) {
      for (std::uint64_t k1 = 0; k1 <= k3; ++k1) {
        for (std::uint64_t k2 = 0; k2 <= k4; ++k2) {
          total += L.joint_counts_pmf(mB, 1.0, 0.0, k1, k2, k3, k4);
        }
      }
    }
  }
  const double mass = L.expectation([&](double, double z) {
    const double mean = mB * g_intensity(0.5, 0.0, z);
    double c = 0.0;
    for (std::uint64_t s = 0; s <= K; ++s) c += poisson_pmf(s, mean);
    return c;
  });
  EXPECT_NEAR(total, mass, 1e-8);
  EXPECT_GT(mass, 0.999);
}

TEST(JointCounts, DiagonalMarginal) {
  // P(N~^x = k1, N^^x = k2) through the x = y form.
  const auto L = laws(0.0, LambdaLaw::point(0.5));
  const double v = L.joint_counts_pmf(1.0, 0.0, 0.0, 1, 2, 1, 2);
  EXPECT_NEAR(v, poisson_pmf(1, 0.5) * poisson_pmf(2, 0.5), 1e-14);
}

TEST(VoidProbability, Examples) {
  for (const LambdaLaw& law : {LambdaLaw::point(0.2), LambdaLaw::uniform(0, 1), LambdaLaw::beta(2, 2)}) {
    const std::vector<VoidCell> one{{0.5, 0.0, 0.0}};
    EXPECT_NEAR(laws(0, law).void_probability_intervals(one), std::exp(-0.5), 1e-14);
  }
  const auto L = laws(1.0, LambdaLaw::uniform(0, 1));
  const std::vector<VoidCell> split{{0.2, 0.1, 0.4}, {0.3, 0.1, 0.4}};
  const std::vector<VoidCell> merged{{0.5, 0.1, 0.4}};
  EXPECT_NEAR(L.void_probability_intervals(split), L.void_probability_intervals(merged), 1e-14);
  const std::vector<VoidCell> unit{{1.0, 0.0, 0.5}};
  EXPECT_NEAR(L.void_probability_intervals(unit), L.joint_maxima_cdf(0.0, 0.5), 1e-13);
  const std::vector<VoidCell> bad{{0.7, 0, 0}, {0.4, 0, 0}};
  EXPECT_THROW(L.void_probability_intervals(bad), InvalidParameter);
  const std::vector<VoidCell> zero{{0.0, 0, 0}};
  EXPECT_THROW(L.void_probability_intervals(zero), InvalidParameter);
}

TEST(FiniteN, IndependentCase) {
  const std::vector<FiniteNCell> cells{{100, 0, 0.0, 0.0}};
  EXPECT_NEAR(finite_n_one_factor_prob(100, 0.0, cells), 0.40554879126127136, 1e-13);
  EXPECT_NEAR(finite_n_one_factor_prob(100, 0.0, cells),
              std::pow(normal_cdf(2.3662547929063944), 100), 1e-12);
  const std::vector<FiniteNCell> mixed{{40, 60, 0.5, -0.5}};
  EXPECT_NEAR(finite_n_one_factor_prob(100, 0.0, mixed),
              std::pow(normal_cdf(level(100, 0.5)), 40) * std::pow(normal_cdf(level(100, -0.5)), 60),
              1e-12);
}

TEST(FiniteN, PinnedOneFactorValues) {
  const std::vector<FiniteNCell> c100{{50, 50, 0.0, 0.5}};
  EXPECT_NEAR(finite_n_one_factor_prob(100, 1.0, c100), 0.6526320025870986, 1e-12);
  const std::vector<FiniteNCell> c1000{{500, 500, 0.0, 0.5}};
  EXPECT_NEAR(finite_n_one_factor_prob(1000, 1.0, c1000), 0.6519233146746998, 1e-12);
}

TEST(FiniteN, Preconditions) {
  const std::vector<FiniteNCell> over{{60, 50, 0.0, 0.0}};
  EXPECT_THROW(finite_n_one_factor_prob(100, 1.0, over), InvalidParameter);
  const std::vector<FiniteNCell> ok{{10, 10, 0.0, 0.0}};
  EXPECT_THROW(finite_n_one_factor_prob(100, std::log(100.0), ok), InvalidParameter);
}

TEST(Locations, ClosedForms) {
  const auto law = LambdaLaw::uniform(0, 1);
  EXPECT_NEAR(locations_cdf(law, LocationPair::obs_missed, 0.3, 0.7), 0.21, 1e-15);
  EXPECT_EQ(locations_cdf(LambdaLaw::point(1), LocationPair::obs_all, 0.3, 0.7), 0.3);
  EXPECT_EQ(locations_cdf(LambdaLaw::point(0), LocationPair::missed_all, 0.8, 0.6), 0.6);
  EXPECT_NEAR(locations_cdf(law, LocationPair::obs_all, 0.25, 0.5), 0.1875, 1e-15);
  EXPECT_THROW(locations_cdf(law, LocationPair::obs_all, 0.0, 0.5), InvalidParameter);
}

TEST(Locations, ReflectedMeanSymmetry) {
  for (double mean : {0.0, 0.25, 0.6, 1.0}) {
    for (double s : {0.2, 0.5, 0.9}) {
      for (double t : {0.1, 0.5, 0.8}) {
        EXPECT_EQ(locations_cdf(LambdaLaw::point(mean), LocationPair::obs_all, s, t),
                  locations_cdf(LambdaLaw::point(1 - mean), LocationPair::missed_all, s, t));
      }
    }
  }
}

TEST(LocationsHeights, Examples) {
  const auto half = laws(0, LambdaLaw::point(0.5));
  EXPECT_NEAR(half.locations_heights_cdf(LocationPair::obs_missed, 0.5, 0.5, 0, 0), 0.25 * e1,
              1e-15);
  const auto L = laws(1.0, LambdaLaw::beta(2, 2));
  EXPECT_NEAR(L.locations_heights_cdf(LocationPair::obs_missed, 1, 1, 0.2, -0.3),
              L.joint_maxima_cdf(0.2, -0.3), 1e-14);
  EXPECT_THROW(L.locations_heights_cdf(LocationPair::obs_all, 0.5, 0.5, 1.0, 0.0),
               InvalidParameter);
  EXPECT_THROW(L.locations_heights_cdf(LocationPair::obs_missed, 0.5, 1.5, 1.0, 0.0),
               InvalidParameter);
}

TEST(LocationsHeights, SplitTermsResumToJointMaxima) {
  // At s = t = 1 the two terms of the obs_all form add back to the joint
  // maxima cdf, and at y -> x this is H(x, x).
  const auto L = laws(0.8, LambdaLaw::uniform(0.1, 0.9));
  for (double x : {-1.0, 0.0, 0.7}) {
    EXPECT_NEAR(L.locations_heights_cdf(LocationPair::obs_all, 1, 1, x, x), L.joint_maxima_cdf(x, x),
                1e-12);
    EXPECT_NEAR(L.locations_heights_cdf(LocationPair::missed_all, 1, 1, x, x + 0.5),
                L.joint_maxima_cdf(x + 0.5, x), 1e-12);
  }
  // Heights at +inf give back the location-only law.
  EXPECT_NEAR(L.locations_heights_cdf(LocationPair::obs_all, 0.3, 0.6, inf, inf),
              locations_cdf(L.params().lambda_law, LocationPair::obs_all, 0.3, 0.6), 1e-12);
}

TEST(LocationsHeights, MonotoneInEveryArgument) {
  const auto L = laws(0.5, LambdaLaw::beta(2, 2));
  for (LocationPair p : {LocationPair::obs_missed, LocationPair::obs_all, LocationPair::missed_all}) {
    const double base = L.locations_heights_cdf(p, 0.4, 0.5, -0.5, 0.5);
    EXPECT_GE(L.locations_heights_cdf(p, 0.6, 0.5, -0.5, 0.5), base);
    EXPECT_GE(L.locations_heights_cdf(p, 0.4, 0.7, -0.5, 0.5), base);
    EXPECT_GE(L.locations_heights_cdf(p, 0.4, 0.5, -0.2, 0.5), base);
    EXPECT_GE(L.locations_heights_cdf(p, 0.4, 0.5, -0.5, 0.9), base);
  }
}

TEST(LimitLaws, ConvergenceFailureIsReported) {
  const LimitLaws L({1.0, LambdaLaw::uniform(0, 1)}, {64, 128, 1e-300});
  EXPECT_THROW(L.joint_maxima_cdf(0.0, 0.5), QuadratureError);
}

TEST(LimitLaws, RejectsBadGamma) {
  EXPECT_THROW(LimitLaws({-1.0, LambdaLaw::point(0.5)}), InvalidParameter);
}

TEST(LogNormalCdf, Tails) {
  EXPECT_NEAR(log_normal_cdf(0.0), std::log(0.5), 1e-15);
  EXPECT_NEAR(log_normal_cdf(-30.0), std::log(0.5 * std::erfc(30.0 / std::numbers::sqrt2)), 1e-10);
  EXPECT_NEAR(log_normal_cdf(9.0), -0.5 * std::erfc(9.0 / std::numbers::sqrt2), 1e-30);
  EXPECT_EQ(log_normal_cdf(inf), 0.0);
}
