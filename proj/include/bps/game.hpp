#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bps/common.hpp"
#include "bps/propagation.hpp"
#include "bps/scenario.hpp"

namespace bps {

/// Thermal noise over `bandwidth_hz`: -174 dBm/Hz plus the receiver noise figure.
double thermal_noise_w(double bandwidth_hz, double noise_figure_db = 9.0);

struct GameParams {
  double alpha = 1.0;
  double beta = 1.0;        // sigmoid centre, linear SINR
  double delta = 0.6;       // price per unserved-UE fraction
  double k = 0.25;          // price weight, 0 < k <= 1/4
  double gamma_min = 0.1;   // linear; -10 dB
  std::vector<double> noise_w;  // per carrier; a single entry applies to all
  double tie_tolerance = 1e-9;
  int max_rounds = 50;
  bool update_prices_each_iteration = false;
  int threads = 1;

  double noise(int carrier) const {
    return noise_w.size() == 1 ? noise_w.front() : noise_w.at(carrier);
  }
  /// Throws InvalidConfig naming the offending field.
  void validate(int carrier_count) const;
};

/// Defaults with per-carrier thermal noise derived from the carrier bandwidths.
GameParams default_game_params(const Scenario& scenario);

/// Level indices into the scenario's PowerLevelSet, one per (location, carrier).
class StrategyProfile {
 public:
  StrategyProfile() = default;
  StrategyProfile(int locations, int carriers);  // all zero

  static StrategyProfile uniform(const Scenario& scenario, std::size_t level);
  static StrategyProfile min_power(const Scenario& scenario);
  static StrategyProfile max_power(const Scenario& scenario);

  int locations() const { return locations_; }
  int carriers() const { return carriers_; }
  int level(int l, int c) const { return levels_[index(l, c)]; }
  void set_level(int l, int c, int level) { levels_[index(l, c)] = level; }
  std::span<const int> levels() const { return levels_; }

  double fraction(const Scenario& s, int l, int c) const { return s.levels()[level(l, c)]; }
  double radiated(const Scenario& s, int l, int c) const {
    return fraction(s, l, c) * s.location(l).max_power_w;
  }
  double total_radiated(const Scenario& s) const;
  double carrier_radiated(const Scenario& s, int c) const;

  bool operator==(const StrategyProfile&) const = default;

 private:
  std::size_t index(int l, int c) const {
    return static_cast<std::size_t>(l) * static_cast<std::size_t>(carriers_) +
           static_cast<std::size_t>(c);
  }
  int locations_ = 0;
  int carriers_ = 0;
  std::vector<int> levels_;
};

/// Price per received watt, one entry per (location, carrier). Each location
/// belongs to exactly one team, so the team index is implied.
class PriceTable {
 public:
  PriceTable() = default;
  PriceTable(int locations, int carriers, double fill = 0.0)
      : carriers_(carriers), values_(static_cast<std::size_t>(locations) * carriers, fill) {}

  double at(int l, int c) const { return values_.at(static_cast<std::size_t>(l) * carriers_ + c); }
  double& at(int l, int c) { return values_.at(static_cast<std::size_t>(l) * carriers_ + c); }
  bool operator==(const PriceTable&) const = default;

 private:
  int carriers_ = 0;
  std::vector<double> values_;
};

/// Scenario + tensor with the derived quantities every payoff evaluation needs
/// (UE-weighted average gains, team member order). Holds references; the
/// scenario and tensor must outlive it.
class GameModel {
 public:
  GameModel(const Scenario& scenario, const AttenuationTensor& tensor);

  const Scenario& scenario() const { return *scenario_; }
  const AttenuationTensor& tensor() const { return *tensor_; }
  /// UE-weighted mean gain over the location's served tiles; 0 when it serves none.
  double average_gain(int l, int c) const {
    return avg_gain_[static_cast<std::size_t>(l) * scenario_->carrier_count() + c];
  }
  /// Team micros sorted by (distance to the team macro, id).
  std::span<const int> micros_by_distance(int team) const { return micro_order_.at(team); }

 private:
  const Scenario* scenario_;
  const AttenuationTensor* tensor_;
  std::vector<double> avg_gain_;
  std::vector<std::vector<int>> micro_order_;
};

/// External interference at tile z on carrier c: every location outside team t.
/// Throws IndexError when z is not a tile of team t.
double interference(const GameModel& model, const StrategyProfile& profile, int team, int tile,
                    int carrier);
/// SINR at tile z served by location l (which must be in team t and serve z).
double sinr(const GameModel& model, const StrategyProfile& profile, int team, int location,
            int tile, int carrier, double noise_w);

struct TeamPayoff {
  double utility = 0.0;
  double power_cost = 0.0;
  double e_t = 0.0;
  double cost = 0.0;  // power_cost + delta * e_t
  double payoff = 0.0;
};

/// Utility, cost and payoff of team t over the carriers in `scope` (all
/// carriers when empty). A tile counts as unserved when its SINR is at most
/// gamma_min on every in-scope carrier. Throws NoUsers when E_t = 0.
TeamPayoff team_payoff(const GameModel& model, const StrategyProfile& profile, int team,
                       const GameParams& params, const PriceTable& prices,
                       std::span<const int> scope = {});
double team_utility(const GameModel& model, const StrategyProfile& profile, int team,
                    const GameParams& params, std::span<const int> scope = {});

/// Dynamic price for every location of team t on carrier c, from
/// the interference seen under `reference`. Zero interference falls back to
/// k*alpha/(4N).
std::vector<double> update_prices(const GameModel& model, const StrategyProfile& reference,
                                  int team, int carrier, const GameParams& params);
/// Prices for every team and carrier from one reference profile.
PriceTable compute_prices(const GameModel& model, const StrategyProfile& reference,
                          const GameParams& params);

/// Composite tie-break key; smaller is preferred. `levels` holds one entry per
/// (member, carrier) in member-major order for the carriers in `carriers`.
std::vector<std::int64_t> tie_break_key(const GameModel& model, int team,
                                        std::span<const int> carriers,
                                        std::span<const int> levels);

struct BestReply {
  std::vector<int> levels;  // one per team member, in Team::members order
  TeamPayoff payoff;
  std::int64_t evaluations = 0;
  int tied_candidates = 0;
};

/// Exhaustive search over P^L for team t on carrier c with everything else in
/// `profile` fixed. Tiles already served on another carrier (per `prior_served`
/// or, when null, per `profile`) never count as unserved.
BestReply best_reply(const GameModel& model, const StrategyProfile& profile, int team,
                     int carrier, const GameParams& params, const PriceTable& prices,
                     const std::vector<std::uint8_t>* prior_served = nullptr);

/// Per-tile flags: SINR above gamma_min on at least one carrier in `carriers`.
std::vector<std::uint8_t> served_tiles_mask(const GameModel& model,
                                            const StrategyProfile& profile,
                                            const GameParams& params,
                                            std::span<const int> carriers);

struct TraceRow {
  int iteration = 0;
  int round = 0;
  int team = 0;
  int carrier = 0;
  double payoff = 0.0;
  double utility = 0.0;
  double cost = 0.0;
  double e_t = 0.0;
  double total_watts = 0.0;  // network-wide radiated power after the move
  bool changed = false;
};

struct CarrierOutcome {
  int carrier = 0;
  int rounds = 0;
  int iterations = 0;
  bool converged = false;
  // evaluations[round][team]
  std::vector<std::vector<std::int64_t>> evaluations;
};

struct GameOutcome {
  StrategyProfile profile;
  PriceTable prices;
  std::vector<TraceRow> trace;
  std::vector<CarrierOutcome> carriers;  // in play order
  int iterations = 0;
  bool converged = false;
  std::int64_t evaluations = 0;
};

/// Best-reply dynamics on one carrier starting from zero power on that carrier
/// (other carriers taken from `initial`). Teams with no UEs are skipped.
/// Prices are computed from the min-power reference when `prices` is null.
GameOutcome run_single_carrier_game(const GameModel& model, int carrier,
                                    const GameParams& params, std::span<const int> team_order,
                                    const PriceTable* prices = nullptr,
                                    const StrategyProfile* initial = nullptr);

/// Per-carrier games in strictly descending centre frequency; settled
/// carriers stay frozen. `carrier_limit` > 0 keeps only the highest
/// `carrier_limit` carriers in play.
GameOutcome run_multi_carrier_game(const GameModel& model, const GameParams& params,
                                   int carrier_limit = 0);

/// All team ids in ascending order.
std::vector<int> default_team_order(const Scenario& scenario);

/// Largest payoff gain any team can get from a unilateral change of its
/// levels on one carrier (all other entries fixed), over the carriers in
/// `scope`. Zero or below means the profile is certified.
struct DeviationReport {
  double worst_gain = 0.0;      // absolute payoff increase of the best deviation
  double worst_relative = 0.0;  // the same, relative to max(|w|, |w'|)
  int worst_team = -1;
  int worst_carrier = -1;
  std::int64_t checked = 0;
  int violations = 0;
};
DeviationReport per_carrier_deviation_check(const GameModel& model,
                                            const StrategyProfile& profile,
                                            const GameParams& params, const PriceTable& prices,
                                            std::span<const int> scope = {});

}  // namespace bps
