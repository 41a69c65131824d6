#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bps/analysis.hpp"
#include "bps/game.hpp"
#include "test_util.hpp"

namespace bps {
namespace {

using test::hand_toy;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST(Game, ThermalNoise) {
  EXPECT_NEAR(thermal_noise_w(10e6), 3.16e-13, 0.01e-13);
  EXPECT_NEAR(thermal_noise_w(10e6, 0.0), 3.98e-14, 0.01e-14);
}

TEST(Game, InterferenceIsLinearSumOverOtherTeams) {
  auto toy = hand_toy({1.0, 1.0, 1.0}, {1, 1, 1}, {0, 1, 2}, {0.0, 1.0});
  toy.tensor.at(1, 0, 0) = 0.01;
  toy.tensor.at(2, 0, 0) = 0.02;
  const GameModel m(toy.scenario, toy.tensor);
  const auto full = StrategyProfile::max_power(toy.scenario);
  EXPECT_NEAR(interference(m, full, 0, 0, 0), 0.03, 1e-15);
  EXPECT_DOUBLE_EQ(interference(m, StrategyProfile(3, 1), 0, 0, 0), 0.0);
  EXPECT_THROW(interference(m, full, 0, 1, 0), IndexError);
}

TEST(Game, SingleTeamHasNoInterference) {
  auto toy = hand_toy({1.0}, {2, 3}, {0, 0}, {0.0, 1.0}, 1, 0.3);
  const GameModel m(toy.scenario, toy.tensor);
  EXPECT_DOUBLE_EQ(interference(m, StrategyProfile::max_power(toy.scenario), 0, 1, 0), 0.0);
}

TEST(Game, SinrDirectSubstitution) {
  auto toy = hand_toy({2.0}, {1}, {0}, {0.0, 1.0}, 1, 0.5);
  const GameModel m(toy.scenario, toy.tensor);
  EXPECT_NEAR(sinr(m, StrategyProfile::max_power(toy.scenario), 0, 0, 0, 0, 0.001), 1000.0, 1e-9);
  EXPECT_DOUBLE_EQ(sinr(m, StrategyProfile(1, 1), 0, 0, 0, 0, 0.001), 0.0);
}

TEST(Game, SinrIncludesIntraTeamInterference) {
  // team 0 = {macro 0, micro 1}; team 1 = {macro 2}
  auto toy = hand_toy({4.0, 1.0, 2.0}, {1, 1, 1}, {0, 1, 2}, {0.0, 0.5, 1.0}, 1, 0.0);
  std::vector<Location> locs(toy.scenario.locations().begin(), toy.scenario.locations().end());
  locs[1].kind = PoaKind::Micro;
  locs[1].team_id = 0;
  locs[2].team_id = 1;
  std::vector<Team> teams{{0, 0, {0, 1}, {}, 0}, {1, 2, {2}, {}, 0}};
  std::vector<Tile> tiles(toy.scenario.tiles().begin(), toy.scenario.tiles().end());
  const Scenario s({toy.scenario.carriers().begin(), toy.scenario.carriers().end()}, locs, tiles,
                   teams, toy.scenario.levels(), toy.scenario.grid(), TrafficProfile{},
                   TimeOfDay::Morning);
  AttenuationTensor t(3, 3, 1);
  t.at(0, 0, 0) = 0.3;
  t.at(1, 0, 0) = 0.2;
  t.at(2, 0, 0) = 0.05;
  const GameModel m(s, t);
  StrategyProfile p(3, 1);
  p.set_level(0, 0, 2);  // 4 W
  p.set_level(1, 0, 1);  // 0.5 W
  p.set_level(2, 0, 1);  // 1 W
  const double expected = 4.0 * 0.3 / (0.01 + 0.5 * 0.2 + 1.0 * 0.05);
  EXPECT_NEAR(sinr(m, p, 0, 0, 0, 0, 0.01), expected, 1e-12);
}

TEST(Game, UtilityAtSigmoidMidpoint) {
  auto toy = hand_toy({1.0}, {3}, {0}, {0.0, 1.0}, 1, 0.001);
  toy.params.noise_w = {0.001};
  const GameModel m(toy.scenario, toy.tensor);
  EXPECT_NEAR(team_utility(m, StrategyProfile::max_power(toy.scenario), 0, toy.params), 0.5,
              1e-12);
}

TEST(Game, UtilitySaturatesAtCarrierCount) {
  auto toy = hand_toy({1.0}, {1, 2}, {0, 0}, {0.0, 1.0}, 3, 1.0);
  toy.params.noise_w = {1e-12};
  const GameModel m(toy.scenario, toy.tensor);
  EXPECT_NEAR(team_utility(m, StrategyProfile::max_power(toy.scenario), 0, toy.params), 3.0,
              1e-9);
}

TEST(Game, UtilityWeightsTilesByUes) {
  // sigmoid values 0.2 and 0.6 on tiles with 1 and 3 UEs
  auto toy = hand_toy({1.0}, {1, 3}, {0, 0}, {0.0, 1.0});
  toy.params.noise_w = {1.0};
  const auto gamma_for = [&](double y) { return toy.params.beta + std::log(y / (1.0 - y)); };
  toy.tensor.at(0, 0, 0) = gamma_for(0.2);
  toy.tensor.at(0, 1, 0) = gamma_for(0.6);
  const GameModel m(toy.scenario, toy.tensor);
  EXPECT_NEAR(team_utility(m, StrategyProfile::max_power(toy.scenario), 0, toy.params), 0.5,
              1e-12);
}

TEST(Game, CostTerms) {
  auto toy = hand_toy({10.0}, {2}, {0}, {0.0, 1.0}, 1, 0.2);
  toy.params.noise_w = {1e-9};
  const GameModel m(toy.scenario, toy.tensor);
  PriceTable prices(1, 1, 0.5);
  const auto on = team_payoff(m, StrategyProfile::max_power(toy.scenario), 0, toy.params, prices);
  EXPECT_NEAR(on.power_cost, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(on.e_t, 0.0);
  EXPECT_NEAR(on.cost, 1.0, 1e-12);
  EXPECT_NEAR(on.payoff, on.utility - on.cost, 1e-15);

  const auto off = team_payoff(m, StrategyProfile(1, 1), 0, toy.params, prices);
  EXPECT_DOUBLE_EQ(off.cost, 0.0);
  toy.params.delta = 0.6;
  const auto unserved = team_payoff(m, StrategyProfile(1, 1), 0, toy.params, prices);
  EXPECT_DOUBLE_EQ(unserved.e_t, 1.0);
  EXPECT_NEAR(unserved.cost, 0.6, 1e-15);
}

TEST(Game, ZeroStrategyPayoffClosedForm) {
  auto toy = hand_toy({1.0}, {1, 4}, {0, 0}, {0.0, 1.0}, 2, 0.1);
  toy.params.alpha = 2.0;
  toy.params.beta = 1.5;
  const GameModel m(toy.scenario, toy.tensor);
  const auto w = team_payoff(m, StrategyProfile(1, 2), 0, toy.params, PriceTable(1, 2, 3.0));
  EXPECT_NEAR(w.payoff, 2.0 / (1.0 + std::exp(2.0 * 1.5)), 1e-12);
}

TEST(Game, NoUsersThrows) {
  auto toy = hand_toy({1.0, 1.0}, {0, 2}, {0, 1}, {0.0, 1.0}, 1, 0.1);
  const GameModel m(toy.scenario, toy.tensor);
  EXPECT_THROW(team_payoff(m, StrategyProfile(2, 1), 0, toy.params, PriceTable(2, 1)), NoUsers);
}

TEST(Game, PricesInverseToInterference) {
  auto toy = hand_toy({1.0, 1.0}, {1, 1}, {0, 1}, {0.0, 0.5, 1.0});
  toy.params.k = 0.25;
  toy.params.alpha = 1.0;
  toy.tensor.at(1, 0, 0) = 0.5;
  const GameModel m(toy.scenario, toy.tensor);
  StrategyProfile ref(2, 1);
  ref.set_level(1, 0, 2);  // 1 W x 0.5 = 0.5 W at tile 0
  EXPECT_NEAR(update_prices(m, ref, 0, 0, toy.params).at(0), 0.5, 1e-12);
  toy.tensor.at(1, 0, 0) = 1.0;
  const GameModel doubled(toy.scenario, toy.tensor);
  EXPECT_NEAR(update_prices(doubled, ref, 0, 0, toy.params).at(0), 0.25, 1e-12);
}

TEST(Game, IsolatedTeamPriceFallback) {
  auto toy = hand_toy({1.0}, {2}, {0}, {0.0, 1.0}, 1, 0.5);
  toy.params.noise_w = {0.02};
  const GameModel m(toy.scenario, toy.tensor);
  const auto prices = compute_prices(m, StrategyProfile::min_power(toy.scenario), toy.params);
  EXPECT_NEAR(prices.at(0, 0), toy.params.k * toy.params.alpha / (4.0 * 0.02), 1e-12);
}

TEST(Game, ParamValidation) {
  GameParams p;
  p.noise_w = {1e-13};
  EXPECT_NO_THROW(p.validate(3));
  auto bad = p;
  bad.k = 0.3;
  EXPECT_THROW(bad.validate(3), InvalidConfig);
  bad = p;
  bad.alpha = 0.0;
  EXPECT_THROW(bad.validate(3), InvalidConfig);
  bad = p;
  bad.noise_w = {1.0, 2.0};
  EXPECT_THROW(bad.validate(3), InvalidConfig);
  bad = p;
  bad.max_rounds = 0;
  EXPECT_THROW(bad.validate(3), InvalidConfig);
}

TEST(Game, HugePriceGivesZeroReply) {
  auto toy = hand_toy({1.0}, {1}, {0}, even_levels(5), 1, 1.0);
  const GameModel m(toy.scenario, toy.tensor);
  const PriceTable prices(1, 1, 10.0 * toy.params.alpha / (4.0 * 0.1));
  const auto r = best_reply(m, StrategyProfile(1, 1), 0, 0, toy.params, prices);
  ASSERT_EQ(r.levels.size(), 1u);
  EXPECT_EQ(r.levels[0], 0);
  EXPECT_EQ(r.evaluations, 5);
}

TEST(Game, DiscreteReplyNearContinuousOptimum) {
  std::vector<double> levels;
  for (int i = 0; i <= 100; ++i) levels.push_back(i / 100.0);
  auto toy = hand_toy({1.0}, {1}, {0}, levels, 1, 1.0);
  const GameModel m(toy.scenario, toy.tensor);
  const auto r = best_reply(m, StrategyProfile(1, 1), 0, 0, toy.params, PriceTable(1, 1, 1.0));
  // grid oracle on w(s) = sigmoid(s/0.1 - 1) - s
  double best_s = 0.0, best_w = -1e9;
  for (int i = 0; i <= 10000; ++i) {
    const double s = i / 10000.0;
    const double w = sigmoid(s / 0.1 - 1.0) - s;
    if (w > best_w) best_w = w, best_s = s;
  }
  EXPECT_NEAR(best_s, 0.306, 0.001);
  EXPECT_NEAR(levels[r.levels[0]], best_s, 0.005 + 1e-12);
}

TEST(Game, EvaluationsArePowerOfLevels) {
  const auto toy = symmetric_pair_toy(3, 4, 1);
  const GameModel m(toy.scenario, toy.tensor);
  const auto prices = compute_prices(m, StrategyProfile::min_power(toy.scenario), toy.params);
  const auto r = best_reply(m, StrategyProfile(toy.scenario.location_count(), 1), 0, 0,
                            toy.params, prices);
  EXPECT_EQ(r.evaluations, 4 * 4 * 4);
}

TEST(Game, TieKeyPrefersNearerMicro) {
  const auto toy = symmetric_pair_toy(3, 3, 1);
  const GameModel m(toy.scenario, toy.tensor);
  const auto& team = toy.scenario.team(0);
  const auto order = m.micros_by_distance(0);
  ASSERT_EQ(order.size(), 2u);
  const auto index_of = [&](int l) {
    return static_cast<std::size_t>(std::find(team.members.begin(), team.members.end(), l) -
                                    team.members.begin());
  };
  std::vector<int> near(team.members.size(), 0), far(team.members.size(), 0);
  near[index_of(order[0])] = 2;
  far[index_of(order[1])] = 2;
  const std::vector<int> carriers{0};
  EXPECT_LT(tie_break_key(m, 0, carriers, near), tie_break_key(m, 0, carriers, far));
  // lower total power always ranks first
  std::vector<int> less = near;
  less[index_of(order[0])] = 1;
  EXPECT_LT(tie_break_key(m, 0, carriers, less), tie_break_key(m, 0, carriers, far));
  EXPECT_THROW(tie_break_key(m, 0, carriers, std::vector<int>{1}), IndexError);
}

TEST(Game, TieKeyIsInjective) {
  const auto toy = symmetric_pair_toy(3, 3, 2);
  const GameModel m(toy.scenario, toy.tensor);
  const std::vector<int> carriers{0, 1};
  std::set<std::vector<std::int64_t>> keys;
  int count = 0;
  std::vector<int> levels(6, 0);
  for (int code = 0; code < 729; ++code) {
    int x = code;
    for (auto& v : levels) v = x % 3, x /= 3;
    keys.insert(tie_break_key(m, 0, carriers, levels));
    ++count;
  }
  EXPECT_EQ(static_cast<int>(keys.size()), count);
}

TEST(Game, SingleTeamConvergesInTwoIterations) {
  auto toy = hand_toy({1.0}, {1}, {0}, even_levels(11), 1, 1.0);
  const GameModel m(toy.scenario, toy.tensor);
  const PriceTable prices(1, 1, 1.0);
  const auto out = run_single_carrier_game(m, 0, toy.params, default_team_order(toy.scenario),
                                           &prices);
  EXPECT_TRUE(out.converged);
  EXPECT_EQ(out.iterations, 2);
  EXPECT_GT(out.profile.level(0, 0), 0);
}

TEST(Game, SymmetricToyGivesSymmetricOutcome) {
  const auto toy = symmetric_pair_toy(2, 4, 2);
  const GameModel m(toy.scenario, toy.tensor);
  const auto out = run_multi_carrier_game(m, toy.params);
  ASSERT_TRUE(out.converged);
  const auto& a = toy.scenario.team(0).members;
  const auto& b = toy.scenario.team(1).members;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int c = 0; c < 2; ++c) EXPECT_EQ(out.profile.level(a[i], c), out.profile.level(b[i], c));
  const auto w0 = team_payoff(m, out.profile, 0, toy.params, out.prices);
  const auto w1 = team_payoff(m, out.profile, 1, toy.params, out.prices);
  EXPECT_NEAR(w0.payoff, w1.payoff, 1e-12);
}

TEST(Game, MultiCarrierPlaysDescendingFrequencyAndCountsEvaluations) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto toy = random_toy(seed);
    const GameModel m(toy.scenario, toy.tensor);
    const auto out = run_multi_carrier_game(m, toy.params);
    const auto order = toy.scenario.carriers_by_descending_frequency();
    ASSERT_EQ(out.carriers.size(), order.size());
    std::int64_t total = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      EXPECT_EQ(out.carriers[i].carrier, order[i]);
      for (const auto& round : out.carriers[i].evaluations)
        for (std::size_t t = 0; t < round.size(); ++t) {
          const auto& team = toy.scenario.team(static_cast<int>(t));
          if (round[t] == 0) continue;  // skipped: no UEs
          EXPECT_EQ(round[t], static_cast<std::int64_t>(std::pow(
                                  toy.scenario.levels().size(), team.members.size())));
          total += round[t];
        }
    }
    EXPECT_EQ(total, out.evaluations);
  }
}

TEST(Game, ConvergedOutcomeIsCertified) {
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    const auto toy = random_toy(seed);
    const GameModel m(toy.scenario, toy.tensor);
    const auto out = run_multi_carrier_game(m, toy.params);
    ASSERT_TRUE(out.converged) << toy.describe();
    const auto report = per_carrier_deviation_check(m, out.profile, toy.params, out.prices);
    EXPECT_EQ(report.violations, 0) << toy.describe();
    for (int l = 0; l < toy.scenario.location_count(); ++l)
      for (int c = 0; c < toy.scenario.carrier_count(); ++c) {
        EXPECT_GE(out.profile.level(l, c), 0);
        EXPECT_LT(out.profile.level(l, c), static_cast<int>(toy.scenario.levels().size()));
      }
  }
}

TEST(Game, SingleCarrierScenarioMatchesSingleCarrierGame) {
  ToyRanges r;
  r.min_carriers = r.max_carriers = 1;
  const auto toy = random_toy(77, r);
  const GameModel m(toy.scenario, toy.tensor);
  const auto multi = run_multi_carrier_game(m, toy.params);
  const auto single =
      run_single_carrier_game(m, 0, toy.params, default_team_order(toy.scenario));
  EXPECT_TRUE(multi.profile == single.profile);
  EXPECT_EQ(multi.iterations, single.iterations);
}

TEST(Game, CarrierLimitLeavesLowerCarriersOff) {
  const auto toy = symmetric_pair_toy(2, 4, 3);
  const GameModel m(toy.scenario, toy.tensor);
  const auto out = run_multi_carrier_game(m, toy.params, 1);
  const auto order = toy.scenario.carriers_by_descending_frequency();
  for (int l = 0; l < toy.scenario.location_count(); ++l)
    for (std::size_t i = 1; i < order.size(); ++i) EXPECT_EQ(out.profile.level(l, order[i]), 0);
}

TEST(Game, TraceRecordsEveryMove) {
  const auto toy = random_toy(5);
  const GameModel m(toy.scenario, toy.tensor);
  const auto out = run_multi_carrier_game(m, toy.params);
  EXPECT_EQ(static_cast<int>(out.trace.size()), out.iterations);
  // the final round of every carrier changes nothing
  ASSERT_FALSE(out.trace.empty());
  EXPECT_FALSE(out.trace.back().changed);
}

TEST(Game, FixedProfiles) {
  const auto toy = symmetric_pair_toy(2, 5, 2);
  const auto& s = toy.scenario;
  const auto lo = StrategyProfile::min_power(s);
  const auto hi = StrategyProfile::max_power(s);
  for (int l = 0; l < s.location_count(); ++l)
    for (int c = 0; c < 2; ++c) {
      EXPECT_EQ(lo.level(l, c), static_cast<int>(s.levels().lowest_nonzero()));
      EXPECT_DOUBLE_EQ(hi.radiated(s, l, c), s.location(l).max_power_w);
    }
  EXPECT_NEAR(hi.total_radiated(s), 2.0 * (20.0 + 20.0 + 1.0 + 1.0), 1e-12);
}

}  // namespace
}  // namespace bps
