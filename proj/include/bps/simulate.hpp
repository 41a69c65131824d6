#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bps/game.hpp"

namespace bps {

enum class Policy { BPS, MaxPower, MinPower, EicicLite };

std::string_view to_string(Policy policy);
std::optional<Policy> parse_policy(std::string_view text);

/// Step lookup from linear SINR to spectral efficiency.
struct RateTable {
  std::vector<double> sinr_db;     // ascending breakpoints
  std::vector<double> efficiency;  // b/s/Hz at and above each breakpoint

  /// 15-step CQI-like table, -6.5 dB .. 19.8 dB.
  static RateTable cqi_default();
  void validate() const;
};

/// Bits one 180 kHz x 1 ms resource block carries at linear SINR `gamma`.
double sinr_to_rate(double gamma, const RateTable& table);

struct PoaEnergy {
  double static_w = 0.0;  // P0
  double slope = 0.0;     // delta_p
};

struct EnergyModel {
  PoaEnergy macro{130.0, 4.7};
  PoaEnergy micro{6.8, 4.0};
  const PoaEnergy& of(PoaKind kind) const { return kind == PoaKind::Macro ? macro : micro; }
  void validate() const;
};

/// (P0 + slope * sum of radiated watts) * duration.
double energy_consumed(const EnergyModel& model, PoaKind kind,
                       std::span<const double> radiated_w, double duration_s);

struct DownloadRequest {
  int id = 0;
  int cell = 0;  // team whose area generated the request
  int tile = 0;
  int ue = 0;    // index within the tile; >= ue_pedestrian means vehicular
  int kind = 0;  // index into the traffic catalog
  double arrival_s = 0.0;
  double size_bits = 0.0;
  double deadline_s = 0.0;
};

/// Majority tile area type of a team (ties to the lower enum value).
AreaType cell_area(const Scenario& scenario, int team);

/// Per-cell homogeneous Poisson arrivals; tile drawn in proportion to its UE
/// count, UE uniform within the tile, kind per catalog probability. Sorted by
/// arrival time (then cell).
std::vector<DownloadRequest> generate_traffic(const Scenario& scenario,
                                              const TrafficProfile& profile, double duration_s,
                                              std::uint64_t seed);

struct PfCandidate {
  double bits_per_rb = 0.0;
  double average_rate = 0.0;  // smoothed bits per TTI
  double remaining_bits = 0.0;
};

/// Greedy proportional-fair RB assignment for one location and carrier in one
/// TTI. Each RB goes to the candidate with the highest
/// bits_per_rb / max(eps, average + served_so_far / tau); candidates stop
/// receiving RBs once their remaining bits are covered. Returns RBs per
/// candidate.
std::vector<int> pf_schedule(std::span<const PfCandidate> candidates, int rb_budget,
                             double tau_tti = 100.0, double epsilon = 1e-9);

/// (sum x)^2 / (n * sum x^2). Throws AllZero when every value is zero.
double jain_index(std::span<const double> values);

struct SimulationConfig {
  double duration_s = 60.0;
  double tti_s = 1e-3;
  double update_period_s = 0.1;
  double cre_bias_db = 8.0;
  double abs_fraction = 0.25;
  double pf_tau_tti = 100.0;
  double pf_epsilon = 1e-9;
  double edge_threshold_db = 3.0;
  RateTable rates = RateTable::cqi_default();
  EnergyModel energy;
  PropagationModel propagation;  // association for EicicLite and fast fading
  GameParams game;               // used by the BPS policy
  int carrier_limit = 0;         // > 0: only the highest carriers carry traffic
  void validate(int carrier_count) const;
};

struct PoaKindMetrics {
  double bits = 0.0;
  double energy_j = 0.0;
  std::int64_t rbs_used = 0;
  double energy_efficiency() const { return energy_j > 0.0 ? bits / energy_j : 0.0; }
  double rb_efficiency_kb() const { return rbs_used > 0 ? bits / 1000.0 / rbs_used : 0.0; }
};

struct MetricsReport {
  Policy policy = Policy::BPS;
  TimeOfDay time_of_day = TimeOfDay::Morning;
  double duration_s = 0.0;
  int requests = 0;
  int completed = 0;
  int failed = 0;
  int in_flight = 0;
  double requested_bits = 0.0;
  double delivered_bits = 0.0;
  double demand_met = 1.0;
  std::vector<double> failed_fraction_by_kind;  // catalog order
  PoaKindMetrics macro, micro;
  double mean_ue_throughput_bps = 0.0;
  int active_ues = 0;
  double jain_all = 1.0, jain_inner = 1.0, jain_edge = 1.0;
  int inner_ues = 0, edge_ues = 0;
  PerArea<double> area_mean_throughput_bps{};
  PerArea<int> area_ues{};
  double radiated_w = 0.0;  // network total of the strategy in force
  bool game_converged = true;
  double delivered_upper_bound_bits = 0.0;  // sum over TTIs of RBs x per-RB rate

  const PoaKindMetrics& of(PoaKind kind) const { return kind == PoaKind::Macro ? macro : micro; }
};

/// Power strategy the policy puts in force (before ABS muting).
struct PolicyStrategy {
  Scenario scenario;  // with the policy's association
  StrategyProfile profile;
  bool converged = true;
};
PolicyStrategy policy_strategy(const Scenario& scenario, const AttenuationTensor& tensor,
                               Policy policy, const SimulationConfig& config);

/// Time-stepped downlink simulation at TTI granularity. The BPS strategy is
/// refreshed every update period; with static inputs the refresh is a cached
/// recomputation. Traffic depends only on (scenario, seed), so policies run on
/// identical request streams.
MetricsReport run_simulation(const Scenario& scenario, const AttenuationTensor& tensor,
                             Policy policy, const SimulationConfig& config, std::uint64_t seed);

/// True when macro PoAs are muted in this TTI under the eICIC policy.
bool is_abs_tti(std::int64_t tti, double abs_fraction);

}  // namespace bps
