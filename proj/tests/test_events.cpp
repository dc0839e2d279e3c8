#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <vector>

#include "gmx/errors.hpp"
#include "gmx/events.hpp"
#include "gmx/rng.hpp"

using namespace gmx;

namespace {

const double inf = std::numeric_limits<double>::infinity();

double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

bool in_class(ObsClass c, std::uint8_t e) {
  return c == ObsClass::all || (c == ObsClass::observed) == (e == 1);
}

// Direct definitions, kept deliberately naive.
bool naive_term(const EventTerm& term, const std::vector<double>& path,
                const std::vector<std::uint8_t>& eps) {
  const std::size_t n = path.size();
  if (const auto* m = std::get_if<MaxTerm>(&term)) {
    std::vector<double> members;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_class(m->cls, eps[j])) members.push_back(path[j]);
    }
    if (members.size() < m->k) return true;
    std::sort(members.rbegin(), members.rend());
    return members[m->k - 1] <= level(n, m->x);
  }
  if (const auto* c = std::get_if<CountTerm>(&term)) {
    std::uint64_t count = 0;
    for (std::size_t j = 1; j <= n; ++j) {
      if (c->family.contains(n, j) && in_class(c->cls, eps[j - 1]) &&
          path[j - 1] > level(n, c->x)) {
        ++count;
      }
    }
    return c->op == CountOp::eq ? count == c->value : count <= c->value;
  }
  const auto& l = std::get<LocationTerm>(term);
  std::optional<std::size_t> loc;
  for (std::size_t j = 0; j < n; ++j) {
    if (in_class(l.cls, eps[j]) && (!loc || path[j] > path[*loc - 1])) loc = j + 1;
  }
  return loc && *loc <= static_cast<std::size_t>(std::floor(n * l.s + 1e-9));
}

std::vector<EventSpec> mixed_events() {
  const IntervalFamily two({{0.0, 0.3}, {0.6, 0.9}});
  return {
      {"max_pair", {MaxTerm{ObsClass::observed, 2, 0.3}, MaxTerm{ObsClass::missed, 1, -0.5}}},
      {"count_le", {CountTerm{ObsClass::all, two, 0.0, CountOp::le, 2}}},
      {"count_eq",
       {CountTerm{ObsClass::observed, IntervalFamily::unit(), -0.5, CountOp::eq, 3},
        CountTerm{ObsClass::missed, two, 1.0, CountOp::eq, 0}}},
      {"loc_height", {LocationTerm{ObsClass::missed, 0.5}, MaxTerm{ObsClass::all, 1, 1.0}}},
      {"loc_pair", {LocationTerm{ObsClass::observed, 0.4}, LocationTerm{ObsClass::all, 0.7}}},
      {"third_all", {MaxTerm{ObsClass::all, 3, 0.0}}},
  };
}

}  // namespace

TEST(EventEvaluator, MatchesNaiveDefinitions) {
  const std::size_t n = 40;
  const auto events = mixed_events();
  const EventEvaluator ev(events, n, OrderStatThreshold::at_least_k);
  Stream s(11);
  std::vector<double> path(n);
  std::vector<std::uint8_t> eps(n), hits(events.size());
  std::vector<int> seen(events.size(), 0);
  for (int rep = 0; rep < 4000; ++rep) {
    // Shift so that the levels are crossed a few times per path.
    for (double& v : path) v = s.normal() + 0.6;
    const double p = s.uniform();
    for (auto& e : eps) e = s.uniform() < p;
    ev.evaluate(path, eps, hits);
    for (std::size_t e = 0; e < events.size(); ++e) {
      bool expected = true;
      for (const auto& t : events[e].terms) expected = expected && naive_term(t, path, eps);
      ASSERT_EQ(hits[e] == 1, expected) << events[e].id << " rep " << rep;
      seen[e] += expected;
    }
  }
  // Every event is hit sometimes and missed sometimes, so the check is not vacuous.
  for (std::size_t e = 0; e < events.size(); ++e) {
    EXPECT_GT(seen[e], 0) << events[e].id;
    EXPECT_LT(seen[e], 4000) << events[e].id;
  }
}

TEST(EventEvaluator, EmptyClassConventions) {
  const std::size_t n = 10;
  const std::vector<EventSpec> events{
      {"max_missed", {MaxTerm{ObsClass::missed, 1, -5.0}}},
      {"loc_missed", {LocationTerm{ObsClass::missed, 1.0}}},
  };
  const EventEvaluator ev(events, n, OrderStatThreshold::at_least_k);
  const std::vector<double> path(n, 10.0);
  const std::vector<std::uint8_t> eps(n, 1);
  std::vector<std::uint8_t> hits(2);
  ev.evaluate(path, eps, hits);
  EXPECT_EQ(hits[0], 1);  // max of an empty class is -inf
  EXPECT_EQ(hits[1], 0);  // no location exists
}

TEST(EventEvaluator, StrictRuleChangesExistence) {
  const std::size_t n = 10;
  const std::vector<EventSpec> events{{"second_obs", {MaxTerm{ObsClass::observed, 2, -5.0}}}};
  std::vector<double> path(n, -10.0);
  path[0] = path[1] = 10.0;
  std::vector<std::uint8_t> eps(n, 0);
  eps[0] = eps[1] = 1;
  std::vector<std::uint8_t> hits(1);
  EventEvaluator(events, n, OrderStatThreshold::at_least_k).evaluate(path, eps, hits);
  EXPECT_EQ(hits[0], 0);
  // Two observed values are not more than k = 2, so the statistic is -inf.
  EventEvaluator(events, n, OrderStatThreshold::more_than_k).evaluate(path, eps, hits);
  EXPECT_EQ(hits[0], 1);
}

TEST(VoidAtoms, CutsAtEveryEndpoint) {
  const EventSpec e{"v",
                    {CountTerm{ObsClass::observed, IntervalFamily({{0.1, 0.4}}), 0.0},
                     MaxTerm{ObsClass::missed, 1, 0.5},
                     CountTerm{ObsClass::all, IntervalFamily({{0.3, 0.6}}), -1.0}}};
  const auto atoms = void_atoms(e);
  ASSERT_TRUE(atoms.has_value());
  ASSERT_EQ(atoms->size(), 5u);
  const double xs[] = {inf, 0.0, -1.0, -1.0, inf};
  const double ys[] = {0.5, 0.5, -1.0, -1.0, 0.5};
  const double cuts[] = {0.0, 0.1, 0.3, 0.4, 0.6, 1.0};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ((*atoms)[i].lower, cuts[i]);
    EXPECT_DOUBLE_EQ((*atoms)[i].upper, cuts[i + 1]);
    EXPECT_EQ((*atoms)[i].x_observed, xs[i]) << i;
    EXPECT_EQ((*atoms)[i].y_missed, ys[i]) << i;
  }
  EXPECT_FALSE(void_atoms({"nv", {CountTerm{ObsClass::observed, IntervalFamily::unit(), 0.0,
                                            CountOp::eq, 1}}}));
  EXPECT_FALSE(void_atoms({"nv", {MaxTerm{ObsClass::observed, 2, 0.0}}}));
}

TEST(LimitTheory, DispatchesToClosedForms) {
  const LimitLaws laws({0.7, LambdaLaw::beta(2, 3)});
  const double tol = 1e-12;
  EXPECT_NEAR(*limit_theory({"a", {MaxTerm{ObsClass::observed, 1, 0.0},
                                   MaxTerm{ObsClass::missed, 1, 0.5}}},
                            laws),
              laws.joint_maxima_cdf(0.0, 0.5), tol);
  EXPECT_NEAR(*limit_theory({"b", {MaxTerm{ObsClass::observed, 2, 0.0},
                                   MaxTerm{ObsClass::all, 3, 0.5}}},
                            laws),
              laws.order_stats_vs_all_cdf(ObsClass::observed, 2, 3, 0.0, 0.5), tol);
  EXPECT_NEAR(*limit_theory({"c", {MaxTerm{ObsClass::missed, 2, 0.4}}}, laws),
              laws.order_stats_obs_missed_cdf(1, 2, inf, 0.4), tol);
  const auto unit = IntervalFamily::unit();
  EXPECT_NEAR(*limit_theory({"d", {CountTerm{ObsClass::observed, unit, 1.0, CountOp::eq, 1},
                                   CountTerm{ObsClass::missed, unit, 1.0, CountOp::eq, 0},
                                   CountTerm{ObsClass::observed, unit, 0.0, CountOp::eq, 2},
                                   CountTerm{ObsClass::missed, unit, 0.0, CountOp::eq, 1}}},
                            laws),
              laws.joint_counts_pmf(1.0, 1.0, 0.0, 1, 0, 2, 1), tol);
  const std::vector<VoidCell> cells{{0.1, inf, 0.5}, {0.3, 0.0, 0.5}, {0.6, inf, 0.5}};
  EXPECT_NEAR(*limit_theory({"e", {CountTerm{ObsClass::observed, IntervalFamily({{0.1, 0.4}}), 0.0},
                                   MaxTerm{ObsClass::missed, 1, 0.5}}},
                            laws),
              laws.void_probability_intervals(cells), tol);
  EXPECT_NEAR(*limit_theory({"f", {LocationTerm{ObsClass::observed, 0.4},
                                   LocationTerm{ObsClass::all, 0.7}}},
                            laws),
              locations_cdf(laws.params().lambda_law, LocationPair::obs_all, 0.4, 0.7), tol);
  EXPECT_NEAR(*limit_theory({"g", {LocationTerm{ObsClass::observed, 0.4},
                                   LocationTerm{ObsClass::all, 0.7},
                                   MaxTerm{ObsClass::observed, 1, 0.0},
                                   MaxTerm{ObsClass::all, 1, 0.5}}},
                            laws),
              laws.locations_heights_cdf(LocationPair::obs_all, 0.4, 0.7, 0.0, 0.5), tol);
  // A count bound away from zero on a strict subfamily has no closed form.
  EXPECT_FALSE(limit_theory({"h", {CountTerm{ObsClass::observed, IntervalFamily({{0.0, 0.5}}),
                                             0.0, CountOp::le, 3}}},
                            laws));
}

TEST(FiniteNTheory, AlternatingPatternJointMaxima) {
  std::vector<std::uint8_t> pattern(1000);
  for (std::size_t j = 0; j < pattern.size(); ++j) pattern[j] = j % 2 == 0;
  const EventSpec e{"m", {MaxTerm{ObsClass::observed, 1, 0.0}, MaxTerm{ObsClass::missed, 1, 0.5}}};
  EXPECT_NEAR(*finite_n_theory(e, 1000, 1.0, pattern), 0.6519233146746998, 1e-12);
  EXPECT_FALSE(finite_n_theory({"k", {MaxTerm{ObsClass::observed, 2, 0.0}}}, 1000, 1.0, pattern));
}

TEST(FiniteNTheory, IndependentCaseIsAProduct) {
  const std::size_t n = 50;
  std::vector<std::uint8_t> pattern(n, 1);
  for (std::size_t j = 20; j < n; ++j) pattern[j] = 0;
  // Indices 1..20 are observed and sit in (0, 0.4], so the tighter u(0)
  // applies; 21..50 only see the all-class bound u(1).
  const EventSpec e{"p",
                    {CountTerm{ObsClass::observed, IntervalFamily({{0.0, 0.4}}), 0.0},
                     CountTerm{ObsClass::all, IntervalFamily({{0.2, 1.0}}), 1.0}}};
  const double p0 = normal_cdf(level(n, 0.0));
  const double p1 = normal_cdf(level(n, 1.0));
  const double expected = std::pow(p0, 20) * std::pow(p1, 30);
  EXPECT_NEAR(*finite_n_theory(e, n, 0.0, pattern), expected, 1e-13);
}
