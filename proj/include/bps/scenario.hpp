#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bps/common.hpp"
#include "bps/propagation.hpp"

namespace bps {

enum class AreaType { CityCentre, Commercial, School, Park, Residential };
enum class TimeOfDay { Morning, Afternoon, Evening };

inline constexpr int kAreaTypeCount = 5;
inline constexpr int kTimeOfDayCount = 3;

std::string_view to_string(AreaType area);
std::string_view to_string(TimeOfDay tod);
std::string_view to_string(PoaKind kind);
std::optional<AreaType> parse_area_type(std::string_view text);
std::optional<TimeOfDay> parse_time_of_day(std::string_view text);
std::optional<PoaKind> parse_poa_kind(std::string_view text);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline constexpr double kResourceBlockBandwidthHz = 180e3;

struct Carrier {
  int id = 0;
  double center_frequency_hz = 0.0;
  double bandwidth_hz = 0.0;

  int rb_count() const {
    return static_cast<int>(std::floor(bandwidth_hz / kResourceBlockBandwidthHz + 1e-9));
  }
  bool operator==(const Carrier&) const = default;
};

struct Location {
  int id = 0;
  PoaKind kind = PoaKind::Macro;
  Point position;
  double max_power_w = 0.0;
  int team_id = 0;
  bool operator==(const Location&) const = default;
};

struct Tile {
  int id = 0;
  int col = 0;
  int row = 0;
  Point center;
  double side_m = 0.0;
  int serving_location = 0;
  int ue_pedestrian = 0;
  int ue_vehicular = 0;
  AreaType area = AreaType::Residential;

  int ue_count() const { return ue_pedestrian + ue_vehicular; }
  bool operator==(const Tile&) const = default;
};

struct Team {
  int id = 0;
  int leader = 0;
  std::vector<int> members;  // leader first, then micros by ascending id
  std::vector<int> tiles;    // union of members' served tiles, ascending
  int ue_count = 0;          // cached E_t; validate_scenario cross-checks it
  bool operator==(const Team&) const = default;
};

/// Discrete transmit-power fractions, strictly ascending, starting at 0.
class PowerLevelSet {
 public:
  PowerLevelSet();  // {0, 0.1, ..., 1.0}
  /// Throws InvalidConfig when the list is not a valid level set.
  explicit PowerLevelSet(std::vector<double> fractions);

  std::size_t size() const { return fractions_.size(); }
  double operator[](std::size_t i) const { return fractions_[i]; }
  std::span<const double> fractions() const { return fractions_; }
  /// Index of the smallest strictly positive level (the min-power strategy).
  std::size_t lowest_nonzero() const;
  std::size_t highest() const { return fractions_.size() - 1; }

  /// Empty when valid; otherwise one message per broken rule.
  static std::vector<std::string> check(std::span<const double> fractions);

  bool operator==(const PowerLevelSet&) const = default;

 private:
  std::vector<double> fractions_;
};

template <typename T>
using PerArea = std::array<T, kAreaTypeCount>;
template <typename T>
using PerTimeOfDay = std::array<T, kTimeOfDayCount>;

struct ContentKind {
  std::string name;
  double size_bits = 0.0;
  double deadline_s = 0.0;
  double probability = 0.0;
  bool operator==(const ContentKind&) const = default;
};

/// UE densities, vehicle shares, time-of-day weights and per-cell request
/// arrival rates. Defaults are the urban table used for the reference runs.
struct TrafficProfile {
  PerArea<double> baseline_density{0.0245, 0.0147, 0.0074, 0.0009, 0.0009};  // UE/m^2
  PerArea<double> vehicle_share{0.30, 0.05, 0.05, 0.05, 0.50};
  PerTimeOfDay<PerArea<double>> density_weight{{{0.5, 0.6, 0.6, 0.8, 0.8},
                                                {1.0, 0.95, 0.95, 0.7, 1.0},
                                                {0.08, 0.5, 0.01, 0.5, 0.6}}};
  PerTimeOfDay<PerArea<double>> arrival_rate{{{0.75, 0.54, 0.27, 0.04, 0.04},
                                              {1.5, 0.9, 0.4, 0.03, 0.05},
                                              {0.12, 0.45, 0.005, 0.02, 0.03}}};
  std::vector<ContentKind> catalog{{"video", 1e6, 0.5, 0.5}, {"generic", 5e5, 1.0, 0.5}};
  double hotspot_factor = 4.0;     // density multiplier around micro PoAs
  double hotspot_radius_m = 60.0;  // tile centres within this range of a micro

  double density(AreaType area, TimeOfDay tod) const {
    return baseline_density[static_cast<int>(area)] *
           density_weight[static_cast<int>(tod)][static_cast<int>(area)];
  }
  double lambda(AreaType area, TimeOfDay tod) const {
    return arrival_rate[static_cast<int>(tod)][static_cast<int>(area)];
  }
  std::vector<std::string> check() const;
  bool operator==(const TrafficProfile&) const = default;
};

/// Regular grid of identical square tiles.
struct TileGrid {
  Point origin;  // lower-left corner
  double side_m = 0.0;
  int cols = 0;
  int rows = 0;

  int count() const { return cols * rows; }
  double width() const { return side_m * cols; }
  double height() const { return side_m * rows; }
  bool contains(Point p) const {
    return p.x >= origin.x && p.x <= origin.x + width() && p.y >= origin.y &&
           p.y <= origin.y + height();
  }
  bool operator==(const TileGrid&) const = default;
};

/// Immutable network snapshot. Location, tile, team and carrier ids equal their
/// index in the corresponding vector.
class Scenario {
 public:
  Scenario() = default;
  Scenario(std::vector<Carrier> carriers, std::vector<Location> locations,
           std::vector<Tile> tiles, std::vector<Team> teams, PowerLevelSet levels,
           TileGrid grid, TrafficProfile traffic, TimeOfDay time_of_day);

  std::span<const Carrier> carriers() const { return carriers_; }
  std::span<const Location> locations() const { return locations_; }
  std::span<const Tile> tiles() const { return tiles_; }
  std::span<const Team> teams() const { return teams_; }
  const Carrier& carrier(int c) const { return carriers_.at(c); }
  const Location& location(int l) const { return locations_.at(l); }
  const Tile& tile(int z) const { return tiles_.at(z); }
  const Team& team(int t) const { return teams_.at(t); }
  const PowerLevelSet& levels() const { return levels_; }
  const TileGrid& grid() const { return grid_; }
  const TrafficProfile& traffic() const { return traffic_; }
  TimeOfDay time_of_day() const { return time_of_day_; }

  int carrier_count() const { return static_cast<int>(carriers_.size()); }
  int location_count() const { return static_cast<int>(locations_.size()); }
  int tile_count() const { return static_cast<int>(tiles_.size()); }
  int team_count() const { return static_cast<int>(teams_.size()); }

  /// Z_l, ascending tile ids.
  std::span<const int> served_tiles(int location) const { return location_tiles_.at(location); }
  int location_ue_count(int location) const { return location_ues_.at(location); }
  int team_ue_count(int team) const;
  bool tile_in_team(int tile, int team) const;

  /// Carrier indices sorted by strictly descending centre frequency.
  std::vector<int> carriers_by_descending_frequency() const;
  /// Lowest-frequency carrier, used as the association reference.
  int reference_carrier() const;

  /// Copy with new per-tile UE counts (team caches refreshed).
  Scenario with_ue_counts(std::span<const int> pedestrian, std::span<const int> vehicular,
                          TimeOfDay time_of_day) const;
  /// Copy with a different tile-to-location association; teams are rebuilt.
  Scenario with_association(std::span<const int> serving_location) const;
  /// Copy with overridden cached team UE totals. Only useful for exercising
  /// validate_scenario on inconsistent data.
  Scenario with_team_ue_cache(int team, int ue_count) const;
  Scenario with_location_kind(int location, PoaKind kind) const;

  bool operator==(const Scenario& other) const;

 private:
  void rebuild_indexes();

  std::vector<Carrier> carriers_;
  std::vector<Location> locations_;
  std::vector<Tile> tiles_;
  std::vector<Team> teams_;
  PowerLevelSet levels_;
  TileGrid grid_;
  TrafficProfile traffic_;
  TimeOfDay time_of_day_ = TimeOfDay::Morning;

  std::vector<std::vector<int>> location_tiles_;
  std::vector<int> location_ues_;
  std::vector<int> tile_team_;
};

struct AreaRing {
  AreaType area = AreaType::Residential;
  double outer_radius_fraction = 1.0;  // of the distance to the farthest grid corner
};

struct CarrierSpec {
  double frequency_hz = 0.0;
  double bandwidth_hz = 0.0;
};

struct ScenarioConfig {
  // geometry
  double inter_site_distance_m = 500.0;
  int macro_count = 57;
  int micros_per_cell = 4;
  double micro_radius_m = 60.0;  // non-overlap: pairwise distance >= 2 * radius
  int micro_placement_retries = 1000;
  // tiles: either a total count or a side length (optionally with explicit cols/rows)
  std::optional<int> tile_count = 4560;
  std::optional<double> tile_side_m;
  std::optional<int> tile_cols;
  std::optional<int> tile_rows;
  int max_ues_per_tile = 10;
  // radio
  std::vector<CarrierSpec> carriers{{2.6e9, 10e6}, {1.8e9, 10e6}, {0.8e9, 10e6}};
  std::vector<double> power_levels{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double macro_max_w = 20.0;
  double micro_max_w = 1.0;
  TrafficProfile traffic;
  std::vector<AreaRing> areas{{AreaType::CityCentre, 0.2},
                              {AreaType::Commercial, 0.4},
                              {AreaType::School, 0.5},
                              {AreaType::Park, 0.6},
                              {AreaType::Residential, 1.0}};
  PropagationModel propagation;

  /// Throws InvalidConfig naming the offending key.
  void validate() const;
};

/// Deterministic for (config, seed). UE counts are zero until populate_ues.
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Expected UE count of one tile before clamping.
double expected_tile_ues(const Scenario& scenario, int tile, TimeOfDay tod);

/// Poisson UE drop per tile for the given time of day, clamped to
/// [0, max_ues_per_tile]; pedestrian/vehicular split is binomial.
Scenario populate_ues(const Scenario& scenario, TimeOfDay tod, std::uint64_t seed,
                      int max_ues_per_tile = 10);

struct Violation {
  std::string entity;
  std::string invariant;
  std::string detail;
};

std::vector<Violation> validate_scenario(const Scenario& scenario);

/// Hexagonal-lattice macro positions in spiral order around the origin.
std::vector<Point> hex_lattice(int count, double inter_site_distance_m);

/// Tile-to-location association maximising received reference power
/// (max power x shadow-free gain on the reference carrier, plus a dB bias for
/// micros). Ties go to the lower location id.
std::vector<int> associate_tiles(const Scenario& scenario, const PropagationModel& model,
                                 double micro_bias_db = 0.0);

}  // namespace bps
