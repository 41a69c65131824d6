#include "bps/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace bps {

namespace {

constexpr std::array<std::string_view, kAreaTypeCount> kAreaNames{
    "CityCentre", "Commercial", "School", "Park", "Residential"};
constexpr std::array<std::string_view, kTimeOfDayCount> kTimeNames{"Morning", "Afternoon",
                                                                   "Evening"};

constexpr std::uint64_t kStreamMicros = 1;
constexpr std::uint64_t kStreamUes = 2;

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

std::string_view to_string(AreaType area) { return kAreaNames[static_cast<int>(area)]; }
std::string_view to_string(TimeOfDay tod) { return kTimeNames[static_cast<int>(tod)]; }
std::string_view to_string(PoaKind kind) { return kind == PoaKind::Macro ? "Macro" : "Micro"; }

std::optional<AreaType> parse_area_type(std::string_view text) {
  for (int i = 0; i < kAreaTypeCount; ++i)
    if (kAreaNames[i] == text) return static_cast<AreaType>(i);
  return std::nullopt;
}

std::optional<TimeOfDay> parse_time_of_day(std::string_view text) {
  for (int i = 0; i < kTimeOfDayCount; ++i)
    if (kTimeNames[i] == text) return static_cast<TimeOfDay>(i);
  return std::nullopt;
}

std::optional<PoaKind> parse_poa_kind(std::string_view text) {
  if (text == "Macro") return PoaKind::Macro;
  if (text == "Micro") return PoaKind::Micro;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// PowerLevelSet

PowerLevelSet::PowerLevelSet()
    : fractions_{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0} {}

PowerLevelSet::PowerLevelSet(std::vector<double> fractions) : fractions_(std::move(fractions)) {
  if (auto problems = check(fractions_); !problems.empty())
    throw InvalidConfig("power.levels: " + join(problems));
}

std::vector<std::string> PowerLevelSet::check(std::span<const double> fractions) {
  std::vector<std::string> problems;
  if (fractions.empty()) {
    problems.emplace_back("level set is empty");
    return problems;
  }
  if (fractions.front() != 0.0) problems.emplace_back("first level must be 0");
  if (fractions.back() > 1.0) problems.emplace_back("last level must be <= 1");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!std::isfinite(fractions[i]) || fractions[i] < 0.0)
      problems.emplace_back("levels must be finite fractions in [0,1]");
    if (i > 0 && !(fractions[i] > fractions[i - 1]))
      problems.emplace_back("levels must be strictly ascending without duplicates");
  }
  if (fractions.size() < 2) problems.emplace_back("level set needs a non-zero level");
  return problems;
}

std::size_t PowerLevelSet::lowest_nonzero() const { return fractions_.size() > 1 ? 1 : 0; }

// ---------------------------------------------------------------------------
// TrafficProfile

std::vector<std::string> TrafficProfile::check() const {
  std::vector<std::string> problems;
  for (int a = 0; a < kAreaTypeCount; ++a) {
    if (baseline_density[a] < 0.0) problems.emplace_back("negative UE density");
    if (vehicle_share[a] < 0.0 || vehicle_share[a] > 1.0)
      problems.emplace_back("vehicle share outside [0,1]");
    for (int t = 0; t < kTimeOfDayCount; ++t) {
      if (density_weight[t][a] < 0.0) problems.emplace_back("negative density weight");
      if (arrival_rate[t][a] < 0.0) problems.emplace_back("negative arrival rate");
    }
  }
  double total = 0.0;
  for (const auto& kind : catalog) {
    if (kind.size_bits <= 0.0 || kind.deadline_s <= 0.0)
      problems.emplace_back("content '" + kind.name + "' needs positive size and deadline");
    if (kind.probability < 0.0) problems.emplace_back("negative content probability");
    total += kind.probability;
  }
  if (catalog.empty() || std::abs(total - 1.0) > 1e-9)
    problems.emplace_back("content probabilities must sum to 1");
  if (hotspot_factor < 0.0 || hotspot_radius_m < 0.0)
    problems.emplace_back("hotspot factor and radius must be nonnegative");
  return problems;
}

// ---------------------------------------------------------------------------
// Scenario

Scenario::Scenario(std::vector<Carrier> carriers, std::vector<Location> locations,
                   std::vector<Tile> tiles, std::vector<Team> teams, PowerLevelSet levels,
                   TileGrid grid, TrafficProfile traffic, TimeOfDay time_of_day)
    : carriers_(std::move(carriers)),
      locations_(std::move(locations)),
      tiles_(std::move(tiles)),
      teams_(std::move(teams)),
      levels_(std::move(levels)),
      grid_(grid),
      traffic_(std::move(traffic)),
      time_of_day_(time_of_day) {
  rebuild_indexes();
}

void Scenario::rebuild_indexes() {
  const auto L = locations_.size();
  location_tiles_.assign(L, {});
  location_ues_.assign(L, 0);
  tile_team_.assign(tiles_.size(), -1);
  for (const auto& tile : tiles_) {
    if (tile.serving_location < 0 || static_cast<std::size_t>(tile.serving_location) >= L)
      throw IndexError("tile " + std::to_string(tile.id) + " served by unknown location " +
                       std::to_string(tile.serving_location));
    location_tiles_[tile.serving_location].push_back(tile.id);
    location_ues_[tile.serving_location] += tile.ue_count();
    tile_team_[tile.id] = locations_[tile.serving_location].team_id;
  }
  for (auto& team : teams_) {
    team.tiles.clear();
    team.ue_count = 0;
    for (int l : team.members) {
      const auto& served = location_tiles_.at(l);
      team.tiles.insert(team.tiles.end(), served.begin(), served.end());
      team.ue_count += location_ues_[l];
    }
    std::sort(team.tiles.begin(), team.tiles.end());
  }
}

int Scenario::team_ue_count(int team) const { return teams_.at(team).ue_count; }

bool Scenario::tile_in_team(int tile, int team) const { return tile_team_.at(tile) == team; }

std::vector<int> Scenario::carriers_by_descending_frequency() const {
  std::vector<int> order(carriers_.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return carriers_[a].center_frequency_hz > carriers_[b].center_frequency_hz;
  });
  return order;
}

int Scenario::reference_carrier() const { return carriers_by_descending_frequency().back(); }

Scenario Scenario::with_ue_counts(std::span<const int> pedestrian, std::span<const int> vehicular,
                                  TimeOfDay time_of_day) const {
  if (pedestrian.size() != tiles_.size() || vehicular.size() != tiles_.size())
    throw IndexError("UE count vectors do not match tile count");
  Scenario copy = *this;
  for (std::size_t z = 0; z < tiles_.size(); ++z) {
    copy.tiles_[z].ue_pedestrian = std::max(0, pedestrian[z]);
    copy.tiles_[z].ue_vehicular = std::max(0, vehicular[z]);
  }
  copy.time_of_day_ = time_of_day;
  copy.rebuild_indexes();
  return copy;
}

Scenario Scenario::with_association(std::span<const int> serving_location) const {
  if (serving_location.size() != tiles_.size())
    throw IndexError("association vector does not match tile count");
  Scenario copy = *this;
  for (std::size_t z = 0; z < tiles_.size(); ++z)
    copy.tiles_[z].serving_location = serving_location[z];
  copy.rebuild_indexes();
  return copy;
}

Scenario Scenario::with_team_ue_cache(int team, int ue_count) const {
  Scenario copy = *this;
  copy.teams_.at(team).ue_count = ue_count;
  return copy;
}

Scenario Scenario::with_location_kind(int location, PoaKind kind) const {
  Scenario copy = *this;
  copy.locations_.at(location).kind = kind;
  return copy;
}

bool Scenario::operator==(const Scenario& other) const {
  return carriers_ == other.carriers_ && locations_ == other.locations_ &&
         tiles_ == other.tiles_ && teams_ == other.teams_ && levels_ == other.levels_ &&
         grid_ == other.grid_ && traffic_ == other.traffic_ &&
         time_of_day_ == other.time_of_day_;
}

// ---------------------------------------------------------------------------
// Geometry

std::vector<Point> hex_lattice(int count, double isd) {
  // Axial neighbour directions, walked ring by ring.
  constexpr std::array<std::array<int, 2>, 6> dirs{
      {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};
  const auto to_xy = [isd](int q, int r) {
    return Point{isd * (q + 0.5 * r), isd * (std::numbers::sqrt3 / 2.0) * r};
  };
  std::vector<Point> out;
  if (count <= 0) return out;
  out.push_back(to_xy(0, 0));
  for (int ring = 1; static_cast<int>(out.size()) < count; ++ring) {
    int q = dirs[4][0] * ring;
    int r = dirs[4][1] * ring;
    for (int side = 0; side < 6; ++side) {
      for (int step = 0; step < ring; ++step) {
        if (static_cast<int>(out.size()) == count) return out;
        out.push_back(to_xy(q, r));
        q += dirs[side][0];
        r += dirs[side][1];
      }
    }
  }
  return out;
}

namespace {

// Point-in-hexagon test for the Voronoi cell of a lattice site.
bool inside_macro_cell(Point p, Point macro, double isd) {
  const double dx = p.x - macro.x;
  const double dy = p.y - macro.y;
  for (int k = 0; k < 6; ++k) {
    const double angle = k * std::numbers::pi / 3.0;
    if (dx * std::cos(angle) + dy * std::sin(angle) > isd / 2.0) return false;
  }
  return true;
}

TileGrid make_grid(const ScenarioConfig& config, std::span<const Point> macros) {
  const double radius = config.inter_site_distance_m / std::numbers::sqrt3;
  double min_x = macros[0].x, max_x = macros[0].x, min_y = macros[0].y, max_y = macros[0].y;
  for (const auto& p : macros) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  min_x -= radius;
  max_x += radius;
  min_y -= radius;
  max_y += radius;
  const double width = max_x - min_x;
  const double height = max_y - min_y;
  const Point centre{(min_x + max_x) / 2.0, (min_y + max_y) / 2.0};

  TileGrid grid;
  if (config.tile_count) {
    // Factor pair whose aspect ratio best matches the bounding box.
    const int n = *config.tile_count;
    int best_cols = n;
    double best_err = std::numeric_limits<double>::infinity();
    for (int cols = 1; cols <= n; ++cols) {
      if (n % cols != 0) continue;
      const int rows = n / cols;
      const double err = std::abs(std::log((static_cast<double>(cols) / rows) / (width / height)));
      if (err < best_err - 1e-12) {
        best_err = err;
        best_cols = cols;
      }
    }
    grid.cols = best_cols;
    grid.rows = n / best_cols;
    grid.side_m = std::max(width / grid.cols, height / grid.rows);
  } else {
    grid.side_m = *config.tile_side_m;
    grid.cols = config.tile_cols ? *config.tile_cols
                                 : static_cast<int>(std::ceil(width / grid.side_m - 1e-9));
    grid.rows = config.tile_rows ? *config.tile_rows
                                 : static_cast<int>(std::ceil(height / grid.side_m - 1e-9));
  }
  grid.origin = {centre.x - grid.width() / 2.0, centre.y - grid.height() / 2.0};
  return grid;
}

AreaType area_for(const ScenarioConfig& config, const TileGrid& grid, Point p) {
  const Point centre{grid.origin.x + grid.width() / 2.0, grid.origin.y + grid.height() / 2.0};
  const double reach = std::hypot(grid.width() / 2.0, grid.height() / 2.0);
  const double rho = reach > 0.0 ? distance(p, centre) / reach : 0.0;
  for (const auto& ring : config.areas)
    if (rho <= ring.outer_radius_fraction) return ring.area;
  return config.areas.back().area;
}

}  // namespace

void ScenarioConfig::validate() const {
  const auto fail = [](const std::string& key, const std::string& why) {
    throw InvalidConfig(key + ": " + why);
  };
  if (!(inter_site_distance_m > 0.0)) fail("geometry.inter_site_distance_m", "must be > 0");
  if (macro_count < 1) fail("geometry.macro_count", "must be >= 1");
  if (micros_per_cell < 0) fail("geometry.micros_per_cell", "must be >= 0");
  if (micro_radius_m < 0.0) fail("geometry.micro_radius_m", "must be >= 0");
  if (micro_placement_retries < 1) fail("geometry.micro_placement_retries", "must be >= 1");
  if (tile_count.has_value() == tile_side_m.has_value())
    fail("tiles", "set exactly one of tiles.count and tiles.side_m");
  if (tile_count && *tile_count < 1) fail("tiles.count", "must be >= 1");
  if (tile_side_m && !(*tile_side_m > 0.0)) fail("tiles.side_m", "must be > 0");
  if ((tile_cols || tile_rows) && !tile_side_m)
    fail("tiles.cols", "explicit cols/rows require tiles.side_m");
  if (tile_cols.has_value() != tile_rows.has_value())
    fail("tiles.rows", "set both tiles.cols and tiles.rows or neither");
  if (tile_cols && (*tile_cols < 1 || *tile_rows < 1)) fail("tiles.cols", "must be >= 1");
  if (max_ues_per_tile < 0) fail("tiles.max_ues_per_tile", "must be >= 0");
  if (carriers.empty()) fail("carriers", "at least one carrier is required");
  std::set<double> freqs;
  for (std::size_t i = 0; i < carriers.size(); ++i) {
    const auto key = "carriers[" + std::to_string(i) + "]";
    if (!(carriers[i].frequency_hz > 0.0)) fail(key + ".freq_hz", "must be > 0");
    if (!(carriers[i].bandwidth_hz > 0.0)) fail(key + ".bandwidth_hz", "must be > 0");
    if (!freqs.insert(carriers[i].frequency_hz).second)
      fail(key + ".freq_hz", "centre frequencies must be distinct");
  }
  if (auto problems = PowerLevelSet::check(power_levels); !problems.empty())
    fail("power.levels", join(problems));
  if (!(macro_max_w > 0.0)) fail("power.macro_max_w", "must be > 0");
  if (!(micro_max_w > 0.0)) fail("power.micro_max_w", "must be > 0");
  if (auto problems = traffic.check(); !problems.empty()) fail("traffic", join(problems));
  if (areas.empty()) fail("areas", "at least one area ring is required");
  propagation.validate();
}

std::vector<int> associate_tiles(const Scenario& scenario, const PropagationModel& model,
                                 double micro_bias_db) {
  const int ref = scenario.reference_carrier();
  const double freq = scenario.carrier(ref).center_frequency_hz;
  std::vector<int> serving(scenario.tile_count(), 0);
  for (const auto& tile : scenario.tiles()) {
    double best = -1.0;
    int best_l = 0;
    for (const auto& loc : scenario.locations()) {
      const double d = std::max(distance(loc.position, tile.center), model.min_distance_m);
      double power = loc.max_power_w * path_gain(model, loc.kind, d, freq, 0.0);
      if (loc.kind == PoaKind::Micro) power *= db_to_linear(micro_bias_db);
      if (power > best) {
        best = power;
        best_l = loc.id;
      }
    }
    serving[tile.id] = best_l;
  }
  return serving;
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();

  const auto macros = hex_lattice(config.macro_count, config.inter_site_distance_m);
  const TileGrid grid = make_grid(config, macros);
  const double isd = config.inter_site_distance_m;
  const double radius = isd / std::numbers::sqrt3;

  std::vector<Location> locations;
  std::vector<Team> teams;
  for (int t = 0; t < config.macro_count; ++t) {
    if (!grid.contains(macros[t]))
      throw GeometryError("macro " + std::to_string(t) + " lies outside the tile grid");
    Team team;
    team.id = t;
    team.leader = static_cast<int>(locations.size());
    team.members.push_back(team.leader);
    locations.push_back({team.leader, PoaKind::Macro, macros[t], config.macro_max_w, t});
    teams.push_back(std::move(team));
  }
  for (int t = 0; t < config.macro_count; ++t) {
    Rng rng = make_rng(seed, kStreamMicros, static_cast<std::uint64_t>(t));
    std::uniform_real_distribution<double> offset(-radius, radius);
    std::vector<Point> placed;
    for (int m = 0; m < config.micros_per_cell; ++m) {
      bool ok = false;
      Point p;
      for (int attempt = 0; attempt < config.micro_placement_retries && !ok; ++attempt) {
        p = {macros[t].x + offset(rng), macros[t].y + offset(rng)};
        if (!inside_macro_cell(p, macros[t], isd) || !grid.contains(p)) continue;
        ok = std::all_of(placed.begin(), placed.end(), [&](Point q) {
          return distance(p, q) >= 2.0 * config.micro_radius_m;
        });
      }
      if (!ok)
        throw GeometryError("could not place micro " + std::to_string(m) + " in cell " +
                            std::to_string(t) + " without overlap after " +
                            std::to_string(config.micro_placement_retries) + " retries");
      placed.push_back(p);
      const int id = static_cast<int>(locations.size());
      locations.push_back({id, PoaKind::Micro, p, config.micro_max_w, t});
      teams[t].members.push_back(id);
    }
  }

  std::vector<Carrier> carriers;
  for (std::size_t c = 0; c < config.carriers.size(); ++c)
    carriers.push_back({static_cast<int>(c), config.carriers[c].frequency_hz,
                        config.carriers[c].bandwidth_hz});

  std::vector<Tile> tiles;
  tiles.reserve(grid.count());
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      Tile tile;
      tile.id = static_cast<int>(tiles.size());
      tile.col = col;
      tile.row = row;
      tile.side_m = grid.side_m;
      tile.center = {grid.origin.x + (col + 0.5) * grid.side_m,
                     grid.origin.y + (row + 0.5) * grid.side_m};
      tile.area = area_for(config, grid, tile.center);
      tiles.push_back(tile);
    }
  }

  Scenario provisional(std::move(carriers), std::move(locations), std::move(tiles),
                       std::move(teams), PowerLevelSet(config.power_levels), grid,
                       config.traffic, TimeOfDay::Morning);
  return provisional.with_association(associate_tiles(provisional, config.propagation));
}

double expected_tile_ues(const Scenario& scenario, int tile_id, TimeOfDay tod) {
  const Tile& tile = scenario.tile(tile_id);
  const auto& traffic = scenario.traffic();
  double mean = traffic.density(tile.area, tod) * tile.side_m * tile.side_m;
  for (const auto& loc : scenario.locations()) {
    if (loc.kind == PoaKind::Micro &&
        distance(loc.position, tile.center) <= traffic.hotspot_radius_m) {
      mean *= traffic.hotspot_factor;
      break;
    }
  }
  return mean;
}

Scenario populate_ues(const Scenario& scenario, TimeOfDay tod, std::uint64_t seed,
                      int max_ues_per_tile) {
  std::vector<int> pedestrian(scenario.tile_count(), 0);
  std::vector<int> vehicular(scenario.tile_count(), 0);
  for (const auto& tile : scenario.tiles()) {
    const double mean = expected_tile_ues(scenario, tile.id, tod);
    if (!(mean > 0.0)) continue;
    Rng rng = make_rng(seed, kStreamUes, static_cast<std::uint64_t>(tile.id));
    int n = std::poisson_distribution<int>(mean)(rng);
    n = std::clamp(n, 0, max_ues_per_tile);
    const double share = scenario.traffic().vehicle_share[static_cast<int>(tile.area)];
    const int veh = n > 0 ? std::binomial_distribution<int>(n, share)(rng) : 0;
    vehicular[tile.id] = veh;
    pedestrian[tile.id] = n - veh;
  }
  return scenario.with_ue_counts(pedestrian, vehicular, tod);
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  const auto add = [&out](std::string entity, std::string invariant, std::string detail = {}) {
    out.push_back({std::move(entity), std::move(invariant), std::move(detail)});
  };

  std::set<double> freqs;
  for (int c = 0; c < s.carrier_count(); ++c) {
    const auto& carrier = s.carrier(c);
    const auto name = "carrier " + std::to_string(c);
    if (carrier.id != c) add(name, "dense ids", "id " + std::to_string(carrier.id));
    if (!(carrier.center_frequency_hz > 0.0)) add(name, "center_frequency > 0");
    if (!(carrier.bandwidth_hz > 0.0)) add(name, "bandwidth > 0");
    if (!freqs.insert(carrier.center_frequency_hz).second) add(name, "distinct center frequencies");
  }

  for (const auto& problem : PowerLevelSet::check(s.levels().fractions()))
    add("power levels", problem);
  for (const auto& problem : s.traffic().check()) add("traffic profile", problem);

  for (int l = 0; l < s.location_count(); ++l) {
    const auto& loc = s.location(l);
    const auto name = "location " + std::to_string(l);
    if (loc.id != l) add(name, "dense ids");
    if (!(loc.max_power_w > 0.0)) add(name, "max_power > 0");
    if (!s.grid().contains(loc.position)) add(name, "position inside network bounding box");
    if (loc.team_id < 0 || loc.team_id >= s.team_count()) add(name, "team exists");
  }

  for (int t = 0; t < s.team_count(); ++t) {
    const auto& team = s.team(t);
    const auto name = "team " + std::to_string(t);
    int macros = 0;
    std::vector<int> expected_tiles;
    int member_ues = 0;
    for (int l : team.members) {
      if (l < 0 || l >= s.location_count()) {
        add(name, "members exist", std::to_string(l));
        continue;
      }
      if (s.location(l).kind == PoaKind::Macro) ++macros;
      if (s.location(l).team_id != t) add(name, "member team ids agree", std::to_string(l));
      const auto served = s.served_tiles(l);
      expected_tiles.insert(expected_tiles.end(), served.begin(), served.end());
      member_ues += s.location_ue_count(l);
    }
    if (macros != 1) add(name, "one Macro per team", std::to_string(macros) + " macros");
    if (team.leader < 0 || team.leader >= s.location_count() ||
        s.location(team.leader).kind != PoaKind::Macro)
      add(name, "leader is Macro");
    std::sort(expected_tiles.begin(), expected_tiles.end());
    if (expected_tiles != team.tiles) add(name, "tiles are the union of member tiles");
    int tile_ues = 0;
    for (int z : team.tiles)
      if (z >= 0 && z < s.tile_count()) tile_ues += s.tile(z).ue_count();
    if (team.ue_count != tile_ues || team.ue_count != member_ues)
      add(name, "UE accounting",
          "E_t=" + std::to_string(team.ue_count) + " sum E_z=" + std::to_string(tile_ues) +
              " sum E_l=" + std::to_string(member_ues));
  }
  for (int l = 0; l < s.location_count(); ++l) {
    const int t = s.location(l).team_id;
    if (t < 0 || t >= s.team_count()) continue;
    const auto& members = s.team(t).members;
    if (std::find(members.begin(), members.end(), l) == members.end())
      add("location " + std::to_string(l), "listed in its team");
  }

  const auto& grid = s.grid();
  std::vector<int> seen(static_cast<std::size_t>(std::max(0, grid.count())), 0);
  for (int z = 0; z < s.tile_count(); ++z) {
    const auto& tile = s.tile(z);
    const auto name = "tile " + std::to_string(z);
    if (tile.id != z) add(name, "dense ids");
    if (tile.side_m != grid.side_m) add(name, "identical side length");
    if (tile.col < 0 || tile.col >= grid.cols || tile.row < 0 || tile.row >= grid.rows) {
      add(name, "tiles partition the network area", "outside grid");
    } else {
      ++seen[static_cast<std::size_t>(tile.row) * grid.cols + tile.col];
      const double cx = grid.origin.x + (tile.col + 0.5) * grid.side_m;
      const double cy = grid.origin.y + (tile.row + 0.5) * grid.side_m;
      if (std::abs(cx - tile.center.x) > 1e-6 * grid.side_m ||
          std::abs(cy - tile.center.y) > 1e-6 * grid.side_m)
        add(name, "tile centre on grid");
    }
    if (tile.ue_pedestrian < 0 || tile.ue_vehicular < 0) add(name, "nonnegative UE counts");
    if (tile.serving_location < 0 || tile.serving_location >= s.location_count()) {
      add(name, "serving location belongs to exactly one team");
    } else {
      const int t = s.location(tile.serving_location).team_id;
      if (t < 0 || t >= s.team_count()) add(name, "serving location belongs to exactly one team");
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i] != 1)
      add("grid cell " + std::to_string(i), "tiles partition the network area",
          std::to_string(seen[i]) + " tiles");
  return out;
}

}  // namespace bps
