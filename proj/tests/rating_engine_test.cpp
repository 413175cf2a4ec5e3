#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "homeadv/rating_engine.hpp"
#include "homeadv/synthetic.hpp"
#include "test_support.hpp"

namespace homeadv {
namespace {

using test::match;

TEST(ModifiedScoreRatio, SmoothsShutOuts) {
  EXPECT_DOUBLE_EQ(modified_score_ratio(0, 0), 0.5);
  EXPECT_NEAR(modified_score_ratio(1, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(modified_score_ratio(3, 1), 4.0 / 6.0, 1e-15);
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      const double s = modified_score_ratio(a, b);
      EXPECT_GT(s, 0.0);
      EXPECT_LT(s, 1.0);
      EXPECT_NEAR(s + modified_score_ratio(b, a), 1.0, 1e-15);
    }
  }
}

TEST(PredictScoreRatio, LogisticOfGap) {
  EXPECT_DOUBLE_EQ(predict_score_ratio(0.4, 0.4, 0.0), 0.5);
  EXPECT_NEAR(predict_score_ratio(0.5, 0.0, 0.5), 0.7310586, 1e-7);
  EXPECT_NEAR(predict_score_ratio(-0.2, -0.2, 0.3), 0.5744425, 1e-7);
  EXPECT_NEAR(logistic(800.0), 1.0, 0.0);
  EXPECT_NEAR(logistic(-800.0), 0.0, 1e-300);
}

TEST(Loss, HandComputedValues) {
  RatingParams params{{{"A", 0.0}, {"B", 0.0}}, 0.0};
  EXPECT_EQ(loss(params, {}), 0.0);
  const std::vector<MatchRecord> draw{match("A", "B", 0, 0)};
  EXPECT_EQ(loss(params, draw), 0.0);
  const std::vector<MatchRecord> win{match("A", "B", 1, 0)};
  EXPECT_NEAR(loss(params, win), (2.0 / 3.0 - 0.5) * (2.0 / 3.0 - 0.5), 1e-15);
  EXPECT_NEAR(loss(params, win), 0.0277778, 1e-7);
}

TEST(Loss, UnknownTeamIsAnError) {
  RatingParams params{{{"A", 0.0}}, 0.0};
  const std::vector<MatchRecord> m{match("A", "B", 1, 0)};
  EXPECT_THROW(loss(params, m), DataError);
  EXPECT_THROW(gradient(params, m), DataError);
}

TEST(Gradient, HandComputedSingleMatch) {
  RatingParams params{{{"A", 0.0}, {"B", 0.0}}, 0.0};
  const std::vector<MatchRecord> win{match("A", "B", 1, 0)};
  const auto g = gradient(params, win);
  EXPECT_NEAR(g.ratings.at("A"), -2.0 * (1.0 / 6.0) * 0.25, 1e-15);
  EXPECT_NEAR(g.home_adv, -0.0833333, 1e-7);
  EXPECT_NEAR(g.ratings.at("B"), 0.0833333, 1e-7);
}

TEST(Gradient, ZeroAtPerfectFit) {
  RatingParams params{{{"A", 0.0}, {"B", 0.0}}, 0.0};
  const std::vector<MatchRecord> draws{match("A", "B", 0, 0), match("B", "A", 2, 2)};
  const auto g = gradient(params, draws);
  EXPECT_EQ(g.home_adv, 0.0);
  EXPECT_EQ(g.ratings.at("A"), 0.0);
  EXPECT_EQ(g.ratings.at("B"), 0.0);
}

TEST(GradientProperty, MatchesCentralFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = test::random_instance(rng);
    const auto g = gradient(inst.params, inst.matches);
    const auto fd = test::finite_difference_gradient(inst.params, inst.matches, 1e-5);
    double scale = std::abs(fd.home_adv);
    for (const auto& [team, v] : fd.ratings) scale = std::max(scale, std::abs(v));
    EXPECT_LE(std::abs(g.home_adv - fd.home_adv), 1e-6 * std::max(std::abs(fd.home_adv), scale));
    for (const auto& [team, v] : fd.ratings) {
      EXPECT_LE(std::abs(g.ratings.at(team) - v), 1e-6 * std::max(std::abs(v), scale)) << team;
    }
  }
}

TEST(LossProperty, ShiftInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = test::random_instance(rng);
    auto shifted = inst.params;
    const double c = shift(rng);
    for (auto& [team, r] : shifted.ratings) r += c;
    EXPECT_NEAR(loss(shifted, inst.matches), loss(inst.params, inst.matches), 1e-12);
  }
}

TEST(Normalize, ShiftsTopRatingToZero) {
  const auto n = normalize({{{"A", 1.0}, {"B", 0.0}}, 0.25});
  EXPECT_EQ(n.ratings.at("A"), 0.0);
  EXPECT_EQ(n.ratings.at("B"), -1.0);
  EXPECT_EQ(n.home_adv, 0.25);
  const auto again = normalize(n);
  EXPECT_EQ(again.ratings, n.ratings);
  EXPECT_THROW(normalize({}), DataError);
}

TEST(NormalizeProperty, PreservesPairwisePredictions) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = test::random_instance(rng);
    const auto n = normalize(inst.params);
    double top = -1e9;
    for (const auto& [a, ra] : n.ratings) {
      top = std::max(top, ra);
      EXPECT_LE(ra, 0.0);
      for (const auto& [b, rb] : n.ratings) {
        const double before = predict_score_ratio(inst.params.ratings.at(a), inst.params.ratings.at(b),
                                                  inst.params.home_adv);
        EXPECT_NEAR(predict_score_ratio(ra, rb, n.home_adv), before, 1e-15);
      }
    }
    EXPECT_EQ(top, 0.0);
  }
}

TEST(FitWindow, AllDrawsGiveFlatRatings) {
  std::vector<MatchRecord> m{match("A", "B", 0, 0), match("B", "C", 1, 1), match("C", "A", 2, 2),
                             match("A", "C", 0, 0)};
  const auto fit = fit_window(m);
  for (const auto& [team, r] : fit.params.ratings) EXPECT_EQ(r, 0.0) << team;
  EXPECT_EQ(fit.params.home_adv, 0.0);
  EXPECT_EQ(fit.loss, 0.0);
  EXPECT_TRUE(fit.converged);
}

TEST(FitWindow, SymmetricHomeWinsAreExplainedByHomeAdvantage) {
  std::vector<MatchRecord> m{match("A", "B", 1, 0), match("B", "A", 1, 0)};
  const auto fit = fit_window(m);
  EXPECT_EQ(fit.params.ratings.at("A"), 0.0);
  EXPECT_EQ(fit.params.ratings.at("B"), 0.0);
  EXPECT_GT(fit.params.home_adv, 0.0);
  // s = 2/3 in both matches, so h = logit(2/3) = ln 2.
  EXPECT_NEAR(fit.params.home_adv, std::log(2.0), 1e-4);
}

TEST(FitWindow, NoiselessRecovery) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto truth = test::random_truth(rng, 6 + 2 * (trial % 4));
    const auto matches = test::noiseless_round_robin(truth);
    const auto fit = test::fit_targets(matches);
    const auto expected = normalize(truth);
    EXPECT_NEAR(fit.params.home_adv, expected.home_adv, 1e-4);
    for (const auto& [team, r] : expected.ratings) EXPECT_NEAR(fit.params.ratings.at(team), r, 1e-4) << team;
  }
}

TEST(FitWindow, LossNeverExceedsInitialLoss) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = test::random_instance(rng);
    RatingParams zero = inst.params;
    for (auto& [t, r] : zero.ratings) r = 0.0;
    zero.home_adv = 0.0;
    const auto fit = fit_window(inst.matches);
    EXPECT_LE(fit.loss, loss(zero, inst.matches));
    double sum = 0.0;
    for (const double e : fit.residuals) sum += e * e;
    EXPECT_NEAR(fit.loss, sum, 1e-12 * std::max(1.0, sum));
    EXPECT_EQ(fit.residuals.size(), inst.matches.size());
  }
}

TEST(FitWindow, DeterministicForFixedInput) {
  std::mt19937_64 rng(23);
  const auto inst = test::random_instance(rng);
  const auto a = fit_window(inst.matches);
  const auto b = fit_window(inst.matches);
  EXPECT_EQ(a.params.ratings, b.params.ratings);
  EXPECT_EQ(a.params.home_adv, b.params.home_adv);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(FitWindow, OneSidedTeamsStillFit) {
  // C only plays away, D only at home.
  std::vector<MatchRecord> m{match("A", "B", 2, 1), match("B", "A", 1, 1), match("A", "C", 3, 0),
                             match("D", "B", 0, 2)};
  const auto fit = fit_window(m);
  EXPECT_EQ(fit.params.ratings.size(), 4u);
  double top = -1.0;
  for (const auto& [t, r] : fit.params.ratings) top = std::max(top, r);
  EXPECT_EQ(top, 0.0);
}

TEST(FitWindow, Errors) {
  EXPECT_THROW(fit_window({}), DataError);
  FitConfig bad;
  bad.step_size = 0.0;
  const std::vector<MatchRecord> m{match("A", "B", 1, 0)};
  EXPECT_THROW(fit_window(m, bad), ConfigError);

  // A step this large overflows the parameters.
  std::vector<MatchRecord> lopsided;
  for (int i = 0; i < 40; ++i) lopsided.push_back(match("A", "B", 5, 0));
  FitConfig huge;
  huge.step_size = 1e308;
  try {
    fit_window(lopsided, huge);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("smaller step size"), std::string::npos);
  }
}

TEST(FitWindow, LargeStepIsBackedOffAndStillConverges) {
  std::mt19937_64 rng(29);
  const auto truth = test::random_truth(rng, 20);
  const auto matches = test::noiseless_round_robin(truth);
  FitConfig cfg;
  cfg.step_size = 8.0;
  const auto fit = test::fit_targets(matches, cfg);
  EXPECT_TRUE(fit.converged);
  EXPECT_LT(fit.final_step_size, 8.0);
  EXPECT_NEAR(fit.params.home_adv, truth.home_adv, 1e-4);
}

}  // namespace
}  // namespace homeadv
