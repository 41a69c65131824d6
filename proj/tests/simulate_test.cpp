#include <gtest/gtest.h>

#include <cmath>

#include "bps/analysis.hpp"
#include "bps/config.hpp"
#include "bps/simulate.hpp"
#include "test_util.hpp"

namespace bps {
namespace {

TEST(Simulate, JainIndex) {
  EXPECT_DOUBLE_EQ(jain_index(std::vector<double>{2.0, 2.0, 2.0}), 1.0);
  EXPECT_DOUBLE_EQ(jain_index(std::vector<double>{0.0, 5.0, 0.0, 0.0}), 0.25);
  EXPECT_NEAR(jain_index(std::vector<double>{1.0, 2.0, 3.0}), 36.0 / 42.0, 1e-15);
  EXPECT_THROW(jain_index(std::vector<double>{0.0, 0.0}), AllZero);
}

TEST(Simulate, EnergyModel) {
  const EnergyModel e;
  EXPECT_DOUBLE_EQ(energy_consumed(e, PoaKind::Macro, std::vector<double>{0.0, 0.0}, 10.0), 1300.0);
  const double one = energy_consumed(e, PoaKind::Micro, std::vector<double>{1.0}, 2.0);
  const double two = energy_consumed(e, PoaKind::Micro, std::vector<double>{1.0, 1.0}, 2.0);
  const double zero = energy_consumed(e, PoaKind::Micro, std::vector<double>{}, 2.0);
  EXPECT_NEAR(two - one, one - zero, 1e-12);  // linear in radiated watts
  EXPECT_DOUBLE_EQ(energy_consumed(e, PoaKind::Micro, std::vector<double>{1.0}, 4.0), 2.0 * one);
  EXPECT_DOUBLE_EQ(one, (6.8 + 4.0) * 2.0);
}

TEST(Simulate, RateLookup) {
  const auto t = RateTable::cqi_default();
  ASSERT_EQ(t.sinr_db.size(), 15u);
  EXPECT_DOUBLE_EQ(sinr_to_rate(db_to_linear(-10.0), t), 0.0);
  EXPECT_DOUBLE_EQ(sinr_to_rate(0.0, t), 0.0);
  EXPECT_NEAR(sinr_to_rate(db_to_linear(40.0), t), 5.55 * 180.0, 1e-9);
  EXPECT_NEAR(sinr_to_rate(db_to_linear(-6.5), t), 0.15 * 180.0, 1e-9);
  double prev = 0.0;
  for (double db = -12.0; db < 25.0; db += 0.05) {
    const double r = sinr_to_rate(db_to_linear(db), t);
    EXPECT_GE(r, prev);
    prev = r;
  }
  RateTable bad = t;
  bad.efficiency.pop_back();
  EXPECT_THROW(bad.validate(), InvalidConfig);
}

TEST(Simulate, PfScheduling) {
  const std::vector<PfCandidate> one{{100.0, 0.0, 1e12}};
  EXPECT_EQ(pf_schedule(one, 50)[0], 50);
  const std::vector<PfCandidate> two{{100.0, 10.0, 1e12}, {100.0, 10.0, 1e12}};
  const auto split = pf_schedule(two, 51);
  EXPECT_LE(std::abs(split[0] - split[1]), 1);
  EXPECT_EQ(split[0] + split[1], 51);
  const std::vector<PfCandidate> dead{{0.0, 0.0, 1e6}, {50.0, 100.0, 1e6}};
  const auto r = pf_schedule(dead, 20);
  EXPECT_EQ(r[0], 0);
  EXPECT_EQ(r[1], 20);
  // a nearly finished download takes only what it needs
  const std::vector<PfCandidate> small{{100.0, 0.0, 250.0}, {100.0, 1e6, 1e12}};
  const auto s = pf_schedule(small, 10);
  EXPECT_EQ(s[0], 3);
  EXPECT_EQ(s[1], 7);
  EXPECT_EQ(pf_schedule(one, 0)[0], 0);
}

TEST(Simulate, AbsPattern) {
  int muted = 0;
  for (int k = 0; k < 1000; ++k) muted += is_abs_tti(k, 0.25);
  EXPECT_EQ(muted, 250);
  for (int k = 0; k < 100; ++k) EXPECT_FALSE(is_abs_tti(k, 0.0));
}

TrafficProfile single_rate_profile(double lambda) {
  TrafficProfile p;
  for (auto& row : p.arrival_rate) row.fill(0.0);
  p.arrival_rate[0][static_cast<int>(AreaType::Residential)] = lambda;
  return p;
}

TEST(Simulate, PoissonArrivalCount) {
  const auto toy = test::hand_toy({1.0}, {3, 1}, {0, 0}, {0.0, 1.0});
  const auto profile = single_rate_profile(1.5);
  double total = 0.0, video = 0.0;
  const int seeds = 1000;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto r = generate_traffic(toy.scenario, profile, 100.0, seed);
    total += r.size();
    for (const auto& q : r) video += q.kind == 0;
  }
  EXPECT_NEAR(total / seeds, 150.0, 150.0 * 0.03);
  const double share = video / total;
  EXPECT_NEAR(share, 0.5, 4.0 * std::sqrt(0.25 / total));
}

TEST(Simulate, TrafficShapeAndDeterminism) {
  const auto toy = test::hand_toy({1.0}, {0, 4}, {0, 0}, {0.0, 1.0});
  const auto profile = single_rate_profile(2.0);
  const auto a = generate_traffic(toy.scenario, profile, 20.0, 3);
  const auto b = generate_traffic(toy.scenario, profile, 20.0, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, static_cast<int>(i));
    EXPECT_EQ(a[i].tile, 1);  // the only tile with UEs
    EXPECT_LT(a[i].ue, 4);
    EXPECT_DOUBLE_EQ(a[i].arrival_s, b[i].arrival_s);
    if (i) EXPECT_LE(a[i - 1].arrival_s, a[i].arrival_s);
    EXPECT_LT(a[i].arrival_s, 20.0);
  }
  EXPECT_TRUE(generate_traffic(toy.scenario, single_rate_profile(0.0), 20.0, 3).empty());
}

SimulationConfig hand_config(const test::HandToy& toy, double duration) {
  SimulationConfig c;
  c.duration_s = duration;
  c.game = toy.params;
  return c;
}

TEST(Simulate, NoTrafficCostsStaticPowerOnly) {
  const auto toy = test::hand_toy({20.0, 20.0}, {2, 2}, {0, 1}, {0.0, 0.5, 1.0}, 1, 1e-6,
                                  single_rate_profile(0.0));
  for (Policy p : {Policy::MaxPower, Policy::MinPower, Policy::BPS, Policy::EicicLite}) {
    const auto m = run_simulation(toy.scenario, toy.tensor, p, hand_config(toy, 2.0), 1);
    EXPECT_EQ(m.requests, 0);
    EXPECT_DOUBLE_EQ(m.demand_met, 1.0);
    EXPECT_NEAR(m.macro.energy_j, 2 * 130.0 * 2.0, 1e-9) << to_string(p);
    EXPECT_DOUBLE_EQ(m.micro.energy_j, 0.0);
  }
}

TEST(Simulate, SingleUeIsServed) {
  auto toy = test::hand_toy({20.0}, {1}, {0}, {0.0, 1.0}, 1, 1e-3, single_rate_profile(0.5));
  toy.params.noise_w = {thermal_noise_w(10e6)};
  const auto m = run_simulation(toy.scenario, toy.tensor, Policy::MaxPower, hand_config(toy, 10.0), 4);
  ASSERT_GT(m.requests, 0);
  EXPECT_EQ(m.failed, 0);
  EXPECT_EQ(m.completed + m.in_flight, m.requests);
  if (m.in_flight == 0) EXPECT_DOUBLE_EQ(m.demand_met, 1.0);
  EXPECT_GT(m.mean_ue_throughput_bps, 0.0);
  EXPECT_DOUBLE_EQ(m.jain_all, 1.0);
}

TEST(Simulate, RejectsShortHorizon) {
  const auto toy = test::hand_toy({1.0}, {1}, {0}, {0.0, 1.0}, 1, 0.1);
  auto c = hand_config(toy, 0.05);
  EXPECT_THROW(run_simulation(toy.scenario, toy.tensor, Policy::MaxPower, c, 1), InvalidConfig);
  c.duration_s = 0.0;
  EXPECT_THROW(c.validate(1), InvalidConfig);
}

TEST(Simulate, PolicyParsing) {
  EXPECT_EQ(parse_policy("BPS"), Policy::BPS);
  EXPECT_EQ(parse_policy("min"), Policy::MinPower);
  EXPECT_EQ(parse_policy("EicicLite"), Policy::EicicLite);
  EXPECT_FALSE(parse_policy("Random").has_value());
  EXPECT_EQ(to_string(Policy::MaxPower), "MaxPower");
}

struct ToyNetwork {
  Scenario scenario;
  AttenuationTensor tensor;
  SimulationConfig sim;
};

ToyNetwork toy_network(std::uint64_t seed) {
  const auto cfg = parse_config(R"({
    "geometry": {"inter_site_distance_m": 200, "macro_count": 2, "micros_per_cell": 1,
                 "micro_radius_m": 20},
    "tiles": {"side_m": 50},
    "carriers": [{"freq_hz": 2.6e9, "bandwidth_hz": 10e6}, {"freq_hz": 0.8e9, "bandwidth_hz": 10e6}],
    "power": {"levels": [0.0, 0.34, 0.67, 1.0]},
    "traffic": {"time_of_day": "Afternoon"},
    "simulation": {"duration_s": 3}
  })");
  ToyNetwork n;
  n.scenario = populate_ues(build_scenario(cfg.scenario, seed), cfg.time_of_day, seed);
  n.tensor = build_attenuation_tensor(n.scenario, cfg.scenario.propagation, seed);
  n.sim = simulation_config(cfg, n.scenario);
  return n;
}

TEST(Simulate, ConservationAccountingAndDeterminism) {
  const auto n = toy_network(2);
  for (Policy p : {Policy::BPS, Policy::MaxPower, Policy::MinPower, Policy::EicicLite}) {
    const auto a = run_simulation(n.scenario, n.tensor, p, n.sim, 9);
    const auto b = run_simulation(n.scenario, n.tensor, p, n.sim, 9);
    EXPECT_EQ(a.failed + a.completed + a.in_flight, a.requests) << to_string(p);
    EXPECT_LE(a.delivered_bits, a.delivered_upper_bound_bits * (1 + 1e-12));
    EXPECT_LE(a.delivered_bits, a.requested_bits * (1 + 1e-12));
    EXPECT_EQ(a.inner_ues + a.edge_ues, a.active_ues);
    EXPECT_DOUBLE_EQ(a.delivered_bits, b.delivered_bits);
    EXPECT_DOUBLE_EQ(a.macro.energy_j, b.macro.energy_j);
    EXPECT_DOUBLE_EQ(a.mean_ue_throughput_bps, b.mean_ue_throughput_bps);
    EXPECT_EQ(a.completed, b.completed);
    EXPECT_GE(a.jain_all, 0.0);
    EXPECT_LE(a.jain_all, 1.0 + 1e-12);
    // static floor: every location draws at least its idle power
    EXPECT_GE(a.macro.energy_j, 2 * 130.0 * n.sim.duration_s - 1e-9);
  }
}

TEST(Simulate, PoliciesShareTheRequestStream) {
  const auto n = toy_network(3);
  const auto a = run_simulation(n.scenario, n.tensor, Policy::MaxPower, n.sim, 5);
  const auto b = run_simulation(n.scenario, n.tensor, Policy::EicicLite, n.sim, 5);
  EXPECT_EQ(a.requests, b.requests);
  EXPECT_DOUBLE_EQ(a.requested_bits, b.requested_bits);
}

TEST(Simulate, EicicMutesMacros) {
  const auto n = toy_network(4);
  const auto ps = policy_strategy(n.scenario, n.tensor, Policy::EicicLite, n.sim);
  const auto hi = StrategyProfile::max_power(n.scenario);
  EXPECT_TRUE(ps.profile == hi);
  // CRE bias can only grow the micro footprint
  int micro_before = 0, micro_after = 0;
  for (const auto& t : n.scenario.tiles())
    micro_before += n.scenario.location(t.serving_location).kind == PoaKind::Micro;
  for (const auto& t : ps.scenario.tiles())
    micro_after += ps.scenario.location(t.serving_location).kind == PoaKind::Micro;
  EXPECT_GE(micro_after, micro_before);
}

TEST(Simulate, CellAreaMajority) {
  const auto toy = test::hand_toy({1.0}, {1, 1}, {0, 0}, {0.0, 1.0});
  EXPECT_EQ(cell_area(toy.scenario, 0), AreaType::Residential);
}

}  // namespace
}  // namespace bps
