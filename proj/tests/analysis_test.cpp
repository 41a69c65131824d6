#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "bps/analysis.hpp"
#include "test_util.hpp"

namespace bps {
namespace {

ContinuousGameParams scalar_params() { return {1.0, 1.0, 1.0, 0.1, 1.0, 1.0}; }

TEST(Analysis, ClosedFormExample) {
  const auto p = scalar_params();
  const auto r = closed_form_best_reply(0.0, p);
  EXPECT_FALSE(r.degenerate);
  EXPECT_NEAR(r.s, 0.306, 0.001);
  EXPECT_NEAR(r.s, grid_best_reply(0.0, p, 100000), p.s_max / 99999.0);
}

TEST(Analysis, ReplyAtPriceBound) {
  auto p = scalar_params();
  const double I = 0.15;
  p.xi = price_bound(I, p);
  const auto s = stationary_best_reply(I, p);
  ASSERT_TRUE(s.has_value());
  EXPECT_NEAR(*s, (I + p.noise) * p.beta / p.a, 1e-12);
  EXPECT_EQ(best_reply_derivative(I, p), -std::numeric_limits<double>::infinity());
  const auto u = payoff_along_best_reply(I, p);
  EXPECT_NEAR(u.utility, 2.0 * p.xi * (I + p.noise) / p.alpha, 1e-12);
}

TEST(Analysis, AboveBoundIsDegenerate) {
  auto p = scalar_params();
  p.xi = 1.01 * price_bound(0.0, p);
  EXPECT_FALSE(stationary_best_reply(0.0, p).has_value());
  const auto r = closed_form_best_reply(0.0, p);
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.s, 0.0);
  EXPECT_THROW(best_reply_derivative(0.0, p), DomainError);
  EXPECT_THROW(payoff_along_best_reply(0.0, p), DomainError);
}

TEST(Analysis, DerivativeSignPattern) {
  auto p = scalar_params();
  p.noise = 0.01;
  p.xi = 1.0;
  const double top = p.alpha / (4.0 * p.xi) - p.noise;
  EXPECT_GT(best_reply_derivative(0.0, p), 0.0);
  EXPECT_LT(best_reply_derivative(top * (1 - 1e-9), p), 0.0);
  int changes = 0;
  double prev = best_reply_derivative(0.0, p);
  for (int i = 1; i < 20000; ++i) {
    const double d = best_reply_derivative(top * i / 20000.0, p);
    if ((d > 0) != (prev > 0)) ++changes;
    prev = d;
  }
  EXPECT_EQ(changes, 1);
}

TEST(Analysis, DerivativeMatchesFiniteDifferences) {
  auto p = scalar_params();
  p.xi = 0.5;
  for (double I : {0.05, 0.1, 0.2, 0.3}) {
    const double h = 1e-5 * (I + p.noise);
    const auto s = [&](double x) { return *stationary_best_reply(x, p); };
    const double fd = (s(I + h) - s(I - h)) / (2.0 * h);
    const auto t = best_reply_derivative_terms(I, p);
    const double scale = std::abs(t.beta_term) + std::abs(t.root_term) + std::abs(t.log_term);
    EXPECT_NEAR(best_reply_derivative(I, p), fd, 1e-6 * scale) << I;
  }
}

TEST(Analysis, PayoffAlongReplyDecreasesAndMatchesScalarPayoff) {
  auto p = scalar_params();
  p.xi = 0.5;
  double prev_u = 1e9, prev_w = 1e9;
  for (double I = 0.0; I < 0.39; I += 0.01) {
    const auto b = payoff_along_best_reply(I, p);
    EXPECT_LT(b.utility, prev_u);
    EXPECT_LT(b.payoff, prev_w);
    prev_u = b.utility;
    prev_w = b.payoff;
    EXPECT_NEAR(b.payoff, scalar_payoff(*stationary_best_reply(I, p), I, p), 1e-12);
  }
}

TEST(Analysis, ClampedReply) {
  auto p = scalar_params();
  p.s_max = 0.1;
  const auto r = closed_form_best_reply(0.0, p);
  EXPECT_TRUE(r.clamped);
  EXPECT_DOUBLE_EQ(r.s, 0.1);
}

TEST(Analysis, ScalarSweepDirections) {
  auto p = scalar_params();
  const auto fractions = even_levels(51);
  std::vector<double> sweep;
  for (int i = 0; i < 100; ++i) sweep.push_back(0.4 + 0.02 * i);
  // zero price: reply never falls as interference grows
  p.xi = 0.0;
  EXPECT_EQ(scalar_sweep(p, fractions, sweep).decreases, 0);
  // priced beyond the stagnation region: reply never rises
  p.xi = 0.2;
  EXPECT_EQ(scalar_sweep(p, fractions, sweep).increases, 0);
}

TEST(Analysis, DiscreteReplyTiesGoLow) {
  auto p = scalar_params();
  p.xi = 1e6;
  const auto f = even_levels(4);
  EXPECT_DOUBLE_EQ(discrete_best_reply(0.0, p, f), 0.0);
}

TEST(Analysis, EvenLevels) {
  const auto f = even_levels(3);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_DOUBLE_EQ(f[1], 0.5);
  EXPECT_DOUBLE_EQ(f[2], 1.0);
}

TEST(Analysis, ToysAreDeterministic) {
  const auto a = random_toy(123);
  const auto b = random_toy(123);
  EXPECT_TRUE(a.scenario == b.scenario);
  EXPECT_TRUE(a.tensor == b.tensor);
  EXPECT_EQ(a.describe(), b.describe());
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto t = random_toy(seed);
    EXPECT_TRUE(validate_scenario(t.scenario).empty()) << t.describe();
    EXPECT_GE(t.scenario.team_count(), 2);
    EXPECT_LE(t.scenario.team_count(), 3);
  }
}

TEST(Analysis, SingleTeamUniqueNeIsArgmax) {
  auto toy = test::hand_toy({1.0}, {1}, {0}, even_levels(11), 1, 1.0);
  const GameModel m(toy.scenario, toy.tensor);
  const PriceTable prices(1, 1, 1.0);
  const auto report = enumerate_pure_ne(m, toy.params, prices);
  ASSERT_EQ(report.equilibria.size(), 1u);
  const auto reply =
      best_reply(m, StrategyProfile(1, 1), 0, 0, toy.params, prices);
  EXPECT_EQ(report.equilibria[0].profile.level(0, 0), reply.levels[0]);
  EXPECT_EQ(report.joint_profiles, 11u);
}

TEST(Analysis, SymmetricTeamsGiveSymmetricNeSet) {
  const auto toy = symmetric_pair_toy(1, 4, 1);
  const GameModel m(toy.scenario, toy.tensor);
  const auto prices = compute_prices(m, StrategyProfile::min_power(toy.scenario), toy.params);
  const auto report = enumerate_pure_ne(m, toy.params, prices);
  ASSERT_FALSE(report.equilibria.empty());
  for (const auto& ne : report.equilibria) {
    StrategyProfile swapped(2, 1);
    swapped.set_level(0, 0, ne.profile.level(1, 0));
    swapped.set_level(1, 0, ne.profile.level(0, 0));
    bool found = false;
    for (const auto& other : report.equilibria) found |= other.profile == swapped;
    EXPECT_TRUE(found);
  }
}

TEST(Analysis, EnumerationContainsConvergedOutcome) {
  for (std::uint64_t seed = 1000; seed < 1020; ++seed) {
    const auto toy = random_toy(seed);
    const GameModel m(toy.scenario, toy.tensor);
    const auto out = run_multi_carrier_game(m, toy.params);
    if (!out.converged || toy.scenario.carrier_count() != 1) continue;
    const auto report = enumerate_pure_ne(m, toy.params, out.prices, {}, &out.profile);
    EXPECT_GE(report.bps_index, 0) << toy.describe();
    double welfare_sum = 0.0;
    for (const auto& team : toy.scenario.teams())
      if (team.ue_count > 0)
        welfare_sum += team_payoff(m, out.profile, team.id, toy.params, out.prices).payoff;
    EXPECT_NEAR(report.bps_welfare, welfare_sum, 1e-12);
    EXPECT_NEAR(social_welfare(m, out.profile, toy.params, out.prices), welfare_sum, 1e-12);
  }
}

TEST(Analysis, EnumerationLimit) {
  const auto toy = symmetric_pair_toy(3, 11, 1);
  const GameModel m(toy.scenario, toy.tensor);
  EXPECT_EQ(joint_profile_count(toy.scenario), 1771561u);
  EXPECT_THROW(enumerate_pure_ne(m, toy.params, PriceTable(6, 1, 1.0), {}, nullptr, 1000),
               TooLarge);
}

TEST(Analysis, JointDeviationAtNe) {
  const auto toy = random_toy(1003);
  const GameModel m(toy.scenario, toy.tensor);
  const auto prices = compute_prices(m, StrategyProfile::min_power(toy.scenario), toy.params);
  const auto report = enumerate_pure_ne(m, toy.params, prices);
  for (const auto& ne : report.equilibria)
    EXPECT_EQ(joint_deviation_check(m, ne.profile, toy.params, prices).violations, 0);
}

TEST(Analysis, SubstitutesReportCounts) {
  const auto toy = random_toy(2024);
  const GameModel m(toy.scenario, toy.tensor);
  const auto prices = compute_prices(m, StrategyProfile::min_power(toy.scenario), toy.params);
  const auto r = check_strategic_substitutes(m, toy.params, prices, 30, 5);
  EXPECT_EQ(r.samples, 30);
  EXPECT_LE(r.compared + r.skipped_incomparable, r.samples * toy.scenario.team_count());
  for (const auto& v : r.violations) {
    EXPECT_GT(v.norm_high, v.norm_low);
    EXPECT_GE(v.interference_norm_high, v.interference_norm_low);
  }
}

TEST(Analysis, MinPowerBeatsMaxPowerOnSymmetricToy) {
  const auto toy = symmetric_pair_toy(3, 5, 1);
  const GameModel m(toy.scenario, toy.tensor);
  const auto prices = compute_prices(m, StrategyProfile::min_power(toy.scenario), toy.params);
  EXPECT_GE(network_mean_payoff(m, StrategyProfile::min_power(toy.scenario), toy.params, prices),
            network_mean_payoff(m, StrategyProfile::max_power(toy.scenario), toy.params, prices));
}

}  // namespace
}  // namespace bps
