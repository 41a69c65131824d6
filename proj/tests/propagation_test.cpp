#include <gtest/gtest.h>

#include <cmath>

#include "bps/propagation.hpp"
#include "bps/scenario.hpp"

namespace bps {
namespace {

double gain_db(const PropagationModel& m, double d, double f) {
  return linear_to_db(path_gain(m, PoaKind::Macro, d, f, 0.0));
}

TEST(Propagation, DoublingDistanceCostsTenNLogTwo) {
  const PropagationModel m;  // macro exponent 3.5
  EXPECT_NEAR(gain_db(m, 100.0, 2e9) - gain_db(m, 200.0, 2e9), 35.0 * std::log10(2.0), 1e-9);
}

TEST(Propagation, FrequencyPenalty) {
  const PropagationModel m;
  EXPECT_NEAR(gain_db(m, 150.0, 0.8e9) - gain_db(m, 150.0, 2.6e9), 20.0 * std::log10(2.6 / 0.8),
              1e-9);
}

TEST(Propagation, ClippedAtOne) {
  PropagationModel m;
  m.macro.intercept_db = -40.0;
  EXPECT_DOUBLE_EQ(path_gain(m, PoaKind::Macro, m.min_distance_m, 1e9, 20.0), 1.0);
  EXPECT_LE(path_gain(PropagationModel{}, PoaKind::Micro, 10.0, 0.8e9, 30.0), 1.0);
}

TEST(Propagation, ShortDistanceClampedAndNonPositiveRejected) {
  const PropagationModel m;
  EXPECT_DOUBLE_EQ(path_gain(m, PoaKind::Micro, 1.0, 2e9, 0.0),
                   path_gain(m, PoaKind::Micro, m.min_distance_m, 2e9, 0.0));
  EXPECT_THROW(path_gain(m, PoaKind::Micro, 0.0, 2e9, 0.0), InvalidDistance);
  EXPECT_THROW(path_gain(m, PoaKind::Micro, -5.0, 2e9, 0.0), InvalidDistance);
}

TEST(Propagation, MonotoneInDistance) {
  const PropagationModel m;
  double prev = 2.0;
  for (double d = 10.0; d < 2000.0; d *= 1.3) {
    const double g = path_gain(m, PoaKind::Macro, d, 1.8e9, 0.0);
    EXPECT_LE(g, prev);
    prev = g;
  }
}

TEST(Propagation, ModelValidation) {
  PropagationModel m;
  m.micro.exponent = 1.9;
  EXPECT_THROW(m.validate(), InvalidConfig);
  m = PropagationModel{};
  m.macro.shadow_sigma_db = -1.0;
  EXPECT_THROW(m.validate(), InvalidConfig);
}

Scenario small_scenario(std::uint64_t seed) {
  ScenarioConfig c;
  c.macro_count = 3;
  c.micros_per_cell = 1;
  c.inter_site_distance_m = 300.0;
  c.micro_radius_m = 20.0;
  c.tile_count.reset();
  c.tile_side_m = 40.0;
  return populate_ues(build_scenario(c, seed), TimeOfDay::Afternoon, seed);
}

TEST(Propagation, TensorShapeRangeAndDeterminism) {
  const auto s = small_scenario(3);
  const PropagationModel m;
  const auto a = build_attenuation_tensor(s, m, 9, 1);
  const auto b = build_attenuation_tensor(s, m, 9, 4);
  EXPECT_EQ(a.locations(), s.location_count());
  EXPECT_EQ(a.tiles(), s.tile_count());
  EXPECT_EQ(a.carriers(), s.carrier_count());
  EXPECT_TRUE(a == b);  // thread count does not change the draws
  for (double v : a.values()) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Propagation, TensorFrequencyAndDistanceOrdering) {
  const auto s = small_scenario(4);
  PropagationModel m;
  m.macro.shadow_sigma_db = 0.0;
  m.micro.shadow_sigma_db = 0.0;
  const auto t = build_attenuation_tensor(s, m, 1);
  const auto order = s.carriers_by_descending_frequency();
  for (int l = 0; l < s.location_count(); ++l)
    for (int z = 0; z < s.tile_count(); ++z) {
      for (std::size_t i = 1; i < order.size(); ++i)
        EXPECT_LE(t.at(l, z, order[i - 1]), t.at(l, z, order[i]));
      const double d = distance(s.location(l).position, s.tile(z).center);
      EXPECT_DOUBLE_EQ(t.at(l, z, 0),
                       path_gain(m, s.location(l).kind, d, s.carrier(0).center_frequency_hz, 0.0));
    }
}

TEST(Propagation, ShadowingSharedAcrossCarriers) {
  const auto s = small_scenario(5);
  const PropagationModel m;
  const auto t = build_attenuation_tensor(s, m, 2);
  for (int l = 0; l < s.location_count(); ++l)
    for (int z = 0; z < s.tile_count(); ++z) {
      const double d = distance(s.location(l).position, s.tile(z).center);
      const auto& loc = s.location(l);
      const double g0 = path_gain(m, loc.kind, d, s.carrier(0).center_frequency_hz, 0.0);
      const double g1 = path_gain(m, loc.kind, d, s.carrier(1).center_frequency_hz, 0.0);
      if (t.at(l, z, 0) >= 1.0 || t.at(l, z, 1) >= 1.0) continue;
      EXPECT_NEAR(linear_to_db(t.at(l, z, 0) / g0), linear_to_db(t.at(l, z, 1) / g1), 1e-9);
    }
}

// Two-tile scenario with a hand-filled tensor.
Scenario two_tile_scenario(int ues_a, int ues_b) {
  ScenarioConfig c;
  c.macro_count = 1;
  c.micros_per_cell = 0;
  c.tile_count = 2;
  c.carriers = {{2e9, 10e6}};
  const auto s = build_scenario(c, 1);
  const std::vector<int> ped{ues_a, ues_b}, veh{0, 0};
  return s.with_ue_counts(ped, veh, TimeOfDay::Morning);
}

TEST(Propagation, AverageAttenuationWeighted) {
  const auto s = two_tile_scenario(1, 3);
  AttenuationTensor t(1, 2, 1);
  t.at(0, 0, 0) = 0.2;
  t.at(0, 1, 0) = 0.4;
  const std::vector<int> tiles{0, 1};
  EXPECT_NEAR(average_attenuation(t, s, 0, 0, tiles), 0.35, 1e-12);
  const std::vector<int> one{0};
  EXPECT_DOUBLE_EQ(average_attenuation(t, s, 0, 0, one), 0.2);
  EXPECT_THROW(average_attenuation(t, s, 0, 0, std::span<const int>{}), EmptyTileSet);
}

TEST(Propagation, AverageAttenuationEqualGainsAndFallback) {
  AttenuationTensor t(1, 2, 1, 0.125);
  const std::vector<int> tiles{0, 1};
  EXPECT_DOUBLE_EQ(average_attenuation(t, two_tile_scenario(2, 7), 0, 0, tiles), 0.125);
  t.at(0, 1, 0) = 0.375;
  // no UEs anywhere: plain mean
  EXPECT_DOUBLE_EQ(average_attenuation(t, two_tile_scenario(0, 0), 0, 0, tiles), 0.25);
}

}  // namespace
}  // namespace bps
