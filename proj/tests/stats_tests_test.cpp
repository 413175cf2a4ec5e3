#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "homeadv/stats_tests.hpp"
#include "test_support.hpp"

namespace homeadv {
namespace {

using test::match;

TEST(RankSum, IdenticalSamplesWithTies) {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 3};
  const auto r = rank_sum_test(x, y);
  EXPECT_DOUBLE_EQ(r.rank_sum, 10.5);
  EXPECT_EQ(r.z_value, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.method, RankSumMethod::normal_approximation);
}

TEST(RankSum, ExactMostExtremeAssignment) {
  const std::vector<double> x{1, 2}, y{3, 4};
  const auto r = rank_sum_test(x, y);
  EXPECT_EQ(r.rank_sum, 3.0);
  EXPECT_EQ(r.method, RankSumMethod::exact);
  EXPECT_NEAR(r.p_value, 1.0 / 3.0, 1e-15);
  EXPECT_LT(r.z_value, 0.0);
}

TEST(RankSum, EmptySampleIsAnError) {
  const std::vector<double> x{1, 2}, empty;
  EXPECT_THROW(rank_sum_test(x, empty), DataError);
  EXPECT_THROW(rank_sum_test(empty, x), DataError);
}

TEST(RankSum, NormalApproximationWithTiesMatchesReference) {
  // Reference: scipy.stats.mannwhitneyu(x, y, use_continuity=True,
  // method="asymptotic"), rank sum = U + n_x(n_x+1)/2.
  const std::vector<double> x{0.12, 0.35, 0.35, 0.41, 0.08, 0.50, 0.27, 0.33, 0.19, 0.44, 0.29, 0.31, 0.05};
  const std::vector<double> y{0.02, 0.11, 0.35, -0.05, 0.09, 0.14, 0.21, 0.08, 0.01, 0.17, 0.12};
  const auto r = rank_sum_test(x, y);
  EXPECT_EQ(r.method, RankSumMethod::normal_approximation);
  EXPECT_DOUBLE_EQ(r.rank_sum, 207.0);
  EXPECT_NEAR(r.p_value, 0.01069407534579865, 1e-12);
  EXPECT_GT(r.z_value, 0.0);
}

TEST(RankSum, TwoSidedNormalTail) {
  // Reference (z, p) pairs, p rounded to three significant digits.
  const std::pair<double, double> rows[] = {{1.097, 2.72e-1}, {2.941, 3.27e-3}, {5.010, 5.44e-7},
                                            {2.208, 2.72e-2}, {3.722, 1.98e-4}, {0.622, 5.34e-1}};
  for (const auto& [z, p] : rows) EXPECT_NEAR(detail::normal_two_sided_p(z) / p, 1.0, 5e-3) << z;
}

// Brute force: every size-n_x subset of ranks 1..n.
double brute_force_p(std::size_t n, std::size_t nx, double observed) {
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(nx), 1);
  std::sort(pick.begin(), pick.end());
  double lower = 0, upper = 0, total = 0;
  do {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += pick[i] ? static_cast<double>(i + 1) : 0.0;
    total += 1;
    lower += s <= observed;
    upper += s >= observed;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

std::vector<double> distinct_values(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> pool(n);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (auto& v : pool) v = u(rng);
  return pool;
}

TEST(RankSumProperty, ExactEqualsBruteForceEnumeration) {
  std::mt19937_64 rng(41);
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::size_t nx = 1; nx < n; ++nx) {
      for (int rep = 0; rep < 10; ++rep) {
        auto pool = distinct_values(rng, n);
        const std::vector<double> x(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(nx));
        const std::vector<double> y(pool.begin() + static_cast<std::ptrdiff_t>(nx), pool.end());
        const auto r = rank_sum_test(x, y);
        ASSERT_EQ(r.method, RankSumMethod::exact);
        EXPECT_NEAR(r.p_value, brute_force_p(n, nx, r.rank_sum), 1e-12);
      }
    }
  }
}

TEST(RankSumProperty, AntisymmetryShiftAndScale) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> size(1, 30), level(0, 6);
  std::uniform_real_distribution<double> shift(-100.0, 100.0), scale(0.01, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(size(rng))), y(static_cast<std::size_t>(size(rng)));
    // Coarse values so ties occur often.
    for (auto& v : x) v = level(rng) * 0.5;
    for (auto& v : y) v = level(rng) * 0.5 - 0.25 * (trial % 3);
    const auto r = rank_sum_test(x, y);
    const auto swapped = rank_sum_test(y, x);
    EXPECT_NEAR(swapped.z_value, -r.z_value, 1e-12);
    EXPECT_NEAR(swapped.p_value, r.p_value, 1e-12);

    const double c = shift(rng), k = scale(rng);
    auto xs = x, ys = y;
    // Exactly representable transform keeps tie structure intact.
    for (auto& v : xs) v = v * 4.0 + 2.0;
    for (auto& v : ys) v = v * 4.0 + 2.0;
    const auto t = rank_sum_test(xs, ys);
    EXPECT_EQ(t.rank_sum, r.rank_sum);
    EXPECT_EQ(t.z_value, r.z_value);
    EXPECT_EQ(t.p_value, r.p_value);

    auto xa = x, ya = y;
    for (auto& v : xa) v = v * k + c;
    for (auto& v : ya) v = v * k + c;
    const auto a = rank_sum_test(xa, ya);
    EXPECT_EQ(a.rank_sum, r.rank_sum);
    EXPECT_NEAR(a.p_value, r.p_value, 1e-12);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    EXPECT_GE(r.rank_sum, nx * (nx + 1) / 2);
    EXPECT_LE(r.rank_sum, nx * (nx + 2 * ny + 1) / 2);
  }
}

TEST(Median, OrderStatistics) {
  EXPECT_EQ(median(std::vector<double>{3}), 3.0);
  EXPECT_EQ(median(std::vector<double>{1, 2, 3, 4}), 2.5);
  EXPECT_EQ(median(std::vector<double>{5, 1, 3}), 3.0);
  EXPECT_THROW(median(std::vector<double>{}), DataError);
}

TEST(BasicStats, Examples) {
  const std::vector<MatchRecord> one{match("A", "B", 2, 1)};
  const auto s = basic_stats(one, "x");
  EXPECT_EQ(s.goals_diff_per_match, 1.0);
  EXPECT_EQ(s.win_ratio_diff, 1.0);
  const std::vector<MatchRecord> two{match("A", "B", 2, 1), match("B", "A", 2, 1)};
  // Home sides win both: goals diff +1, win ratio diff +1.
  EXPECT_EQ(basic_stats(two, "x").goals_diff_per_match, 1.0);
  const std::vector<MatchRecord> even{match("A", "B", 2, 1), match("A", "B", 1, 2)};
  EXPECT_EQ(basic_stats(even, "x").goals_diff_per_match, 0.0);
  EXPECT_EQ(basic_stats(even, "x").win_ratio_diff, 0.0);
  EXPECT_THROW(basic_stats({}, "x"), DataError);
}

TEST(BasicStatsProperty, MirroredSetIsBalanced) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = test::random_instance(rng);
    std::vector<MatchRecord> mirrored = inst.matches;
    for (const auto& m : inst.matches) mirrored.push_back(match(m.away_team, m.home_team, m.away_goals, m.home_goals));
    // Mirroring swaps venue and scores, so the home side's view flips.
    const auto s = basic_stats(mirrored, "m");
    EXPECT_EQ(s.goals_diff_per_match, 0.0);
    EXPECT_EQ(s.win_ratio_diff, 0.0);
    EXPECT_GE(basic_stats(inst.matches, "r").win_ratio_diff, -1.0);
    EXPECT_LE(basic_stats(inst.matches, "r").win_ratio_diff, 1.0);
  }
}

TEST(Standings, PointsThenTieBreaks) {
  const std::vector<MatchRecord> twice{match("A", "B", 1, 0), match("B", "A", 0, 2)};
  const auto r = compute_standings(twice);
  EXPECT_EQ(r.at("A"), 1);
  EXPECT_EQ(r.at("B"), 2);

  // All draws: goal difference is 0 for all, then goals scored, then name.
  const std::vector<MatchRecord> draws{match("C", "B", 2, 2), match("A", "D", 0, 0), match("B", "D", 1, 1),
                                       match("A", "C", 1, 1)};
  const auto d = compute_standings(draws);
  EXPECT_EQ(d.at("B"), 1);  // 3 goals
  EXPECT_EQ(d.at("C"), 2);  // 3 goals, name after B
  EXPECT_EQ(d.at("A"), 3);  // 1 goal, name before D
  EXPECT_EQ(d.at("D"), 4);  // 1 goal
  EXPECT_THROW(compute_standings({}), DataError);
}

TEST(Standings, HandComputedTable) {
  const std::vector<MatchRecord> season{
      match("A", "B", 2, 0), match("C", "D", 1, 1), match("A", "C", 3, 1), match("B", "D", 2, 0),
      match("D", "A", 1, 1), match("B", "C", 0, 1),
  };
  // A: W W D = 7; B: L W L = 3; C: D L W = 4; D: D L D = 2.
  const auto r = compute_standings(season);
  EXPECT_EQ(r.at("A"), 1);
  EXPECT_EQ(r.at("C"), 2);
  EXPECT_EQ(r.at("B"), 3);
  EXPECT_EQ(r.at("D"), 4);
}

TEST(HomeBalanceCorrelation, DegenerateAndPerfect) {
  const std::map<std::string, int> standings{{"A", 1}, {"B", 2}, {"C", 3}, {"D", 4}};
  // Each team hosts exactly once: zero variance.
  const std::vector<MatchRecord> even{match("A", "B", 0, 0), match("B", "C", 0, 0), match("C", "D", 0, 0),
                                      match("D", "A", 0, 0)};
  EXPECT_THROW(home_balance_correlation(even, standings), NumericError);

  // Home counts 1, 2, 3, 4 follow the rank.
  std::vector<MatchRecord> prop;
  for (const auto& [team, rank] : standings) {
    for (int k = 0; k < rank; ++k) prop.push_back(match(team, team == "A" ? "B" : "A", 1, 0));
  }
  EXPECT_NEAR(home_balance_correlation(prop, standings), 1.0, 1e-12);
  EXPECT_NEAR(home_balance_correlation(prop, standings, CorrelationMethod::spearman), 1.0, 1e-12);

  const std::map<std::string, int> single{{"A", 1}};
  EXPECT_THROW(home_balance_correlation({}, single), DataError);
  const std::vector<MatchRecord> stranger{match("A", "Z", 1, 0)};
  EXPECT_THROW(home_balance_correlation(stranger, standings), DataError);
}

HomeAdvEstimate estimate(std::string league, AttendanceClass cls, double value) {
  HomeAdvEstimate e;
  e.league = std::move(league);
  e.attendance_class = cls;
  e.home_adv_win_units = value;
  return e;
}

TEST(CompareAllClasses, OverallRowsInClassOrder) {
  std::vector<HomeAdvEstimate> est;
  const AttendanceClass classes[] = {AttendanceClass::past, AttendanceClass::normal, AttendanceClass::mixed,
                                     AttendanceClass::closed};
  for (int i = 0; i < 40; ++i) est.push_back(estimate("E", classes[i % 4], 0.01 * i));
  const auto cmp = compare_all_classes(est, Grouping::overall);
  ASSERT_EQ(cmp.rows.size(), 6u);
  const std::pair<AttendanceClass, AttendanceClass> expected[] = {
      {AttendanceClass::past, AttendanceClass::normal},   {AttendanceClass::past, AttendanceClass::mixed},
      {AttendanceClass::past, AttendanceClass::closed},   {AttendanceClass::normal, AttendanceClass::mixed},
      {AttendanceClass::normal, AttendanceClass::closed}, {AttendanceClass::mixed, AttendanceClass::closed}};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(cmp.rows[i].sample_x, expected[i].first);
    EXPECT_EQ(cmp.rows[i].sample_y, expected[i].second);
    EXPECT_EQ(cmp.rows[i].result.n_x, 10u);
  }
}

TEST(CompareAllClasses, PerLeagueSkipsMixedAndAbsentClasses) {
  std::vector<HomeAdvEstimate> est;
  for (int i = 0; i < 12; ++i) {
    est.push_back(estimate("England", kAllClasses[i % 4], 0.1 * i));
    est.push_back(estimate("France", i % 2 ? AttendanceClass::past : AttendanceClass::normal, 0.1 * i));
  }
  const auto cmp = compare_all_classes(est, Grouping::per_league);
  std::size_t england = 0, france = 0;
  for (const auto& r : cmp.rows) {
    EXPECT_NE(r.sample_x, AttendanceClass::mixed);
    EXPECT_NE(r.sample_y, AttendanceClass::mixed);
    (r.league == "England" ? england : france)++;
  }
  EXPECT_EQ(england, 3u);
  EXPECT_EQ(france, 1u);
  EXPECT_FALSE(cmp.notices.empty());
}

TEST(CompareAllClasses, SingleClassGivesNotice) {
  std::vector<HomeAdvEstimate> est{estimate("E", AttendanceClass::past, 0.1), estimate("E", AttendanceClass::past, 0.2)};
  const auto cmp = compare_all_classes(est, Grouping::overall);
  EXPECT_TRUE(cmp.rows.empty());
  ASSERT_EQ(cmp.notices.size(), 1u);
}

}  // namespace
}  // namespace homeadv
