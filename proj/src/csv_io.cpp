#include "bps/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace bps {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

double to_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw IoError(where + ": not a number: '" + text + "'");
  return v;
}

int to_int(const std::string& text, const std::string& where) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw IoError(where + ": not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Typed access to one row by column name.
struct RowView {
  const CsvTable& table;
  const std::vector<std::string>& row;
  std::string file;

  const std::string& text(const std::string& col) const { return row.at(table.column(col)); }
  double num(const std::string& col) const { return to_double(text(col), file + ":" + col); }
  int integer(const std::string& col) const { return to_int(text(col), file + ":" + col); }
};

template <typename F>
void for_rows(const fs::path& path, F&& body) {
  const CsvTable table = read_csv(path);
  for (const auto& row : table.rows) body(RowView{table, row, path.filename().string()});
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw IoError("missing CSV column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  table.header = split(line);
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size())
      throw IoError(path.string() + ":" + std::to_string(n) + ": expected " +
                    std::to_string(table.header.size()) + " fields");
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Scenario

void write_scenario(const fs::path& dir, const Scenario& s) {
  CsvTable tiles{{"id", "x", "y", "side", "area_type", "serving_location", "ue_ped", "ue_veh"}, {}};
  for (const auto& t : s.tiles())
    tiles.rows.push_back({std::to_string(t.id), format_double(t.center.x),
                          format_double(t.center.y), format_double(t.side_m),
                          std::string(to_string(t.area)), std::to_string(t.serving_location),
                          std::to_string(t.ue_pedestrian), std::to_string(t.ue_vehicular)});
  write_csv(dir / "tiles.csv", tiles);

  CsvTable locations{{"id", "kind", "x", "y", "max_w", "team"}, {}};
  for (const auto& l : s.locations())
    locations.rows.push_back({std::to_string(l.id), std::string(to_string(l.kind)),
                              format_double(l.position.x), format_double(l.position.y),
                              format_double(l.max_power_w), std::to_string(l.team_id)});
  write_csv(dir / "locations.csv", locations);

  CsvTable carriers{{"id", "freq_hz", "bandwidth_hz"}, {}};
  for (const auto& c : s.carriers())
    carriers.rows.push_back({std::to_string(c.id), format_double(c.center_frequency_hz),
                             format_double(c.bandwidth_hz)});
  write_csv(dir / "carriers.csv", carriers);

  CsvTable levels{{"index", "fraction"}, {}};
  for (std::size_t i = 0; i < s.levels().size(); ++i)
    levels.rows.push_back({std::to_string(i), format_double(s.levels()[i])});
  write_csv(dir / "levels.csv", levels);

  const auto& g = s.grid();
  CsvTable network{{"key", "value"},
                   {{"grid_origin_x", format_double(g.origin.x)},
                    {"grid_origin_y", format_double(g.origin.y)},
                    {"grid_side_m", format_double(g.side_m)},
                    {"grid_cols", std::to_string(g.cols)},
                    {"grid_rows", std::to_string(g.rows)},
                    {"time_of_day", std::string(to_string(s.time_of_day()))}}};
  write_csv(dir / "network.csv", network);
}

Scenario read_scenario(const fs::path& dir, const TrafficProfile& traffic) {
  std::map<std::string, std::string> net;
  for_rows(dir / "network.csv", [&](const RowView& r) { net[r.text("key")] = r.text("value"); });
  const auto net_value = [&](const std::string& key) -> const std::string& {
    const auto it = net.find(key);
    if (it == net.end()) throw IoError("network.csv: missing key '" + key + "'");
    return it->second;
  };
  TileGrid grid;
  grid.origin = {to_double(net_value("grid_origin_x"), "grid_origin_x"),
                 to_double(net_value("grid_origin_y"), "grid_origin_y")};
  grid.side_m = to_double(net_value("grid_side_m"), "grid_side_m");
  grid.cols = to_int(net_value("grid_cols"), "grid_cols");
  grid.rows = to_int(net_value("grid_rows"), "grid_rows");
  const auto tod = parse_time_of_day(net_value("time_of_day"));
  if (!tod) throw IoError("network.csv: bad time_of_day");

  std::vector<Carrier> carriers;
  for_rows(dir / "carriers.csv", [&](const RowView& r) {
    carriers.push_back({r.integer("id"), r.num("freq_hz"), r.num("bandwidth_hz")});
  });
  std::vector<double> fractions;
  for_rows(dir / "levels.csv", [&](const RowView& r) { fractions.push_back(r.num("fraction")); });

  std::vector<Location> locations;
  for_rows(dir / "locations.csv", [&](const RowView& r) {
    const auto kind = parse_poa_kind(r.text("kind"));
    if (!kind) throw IoError("locations.csv: bad kind '" + r.text("kind") + "'");
    locations.push_back({r.integer("id"), *kind, {r.num("x"), r.num("y")}, r.num("max_w"),
                         r.integer("team")});
  });
  std::vector<Tile> tiles;
  for_rows(dir / "tiles.csv", [&](const RowView& r) {
    Tile t;
    t.id = r.integer("id");
    t.center = {r.num("x"), r.num("y")};
    t.side_m = r.num("side");
    const auto area = parse_area_type(r.text("area_type"));
    if (!area) throw IoError("tiles.csv: bad area_type '" + r.text("area_type") + "'");
    t.area = *area;
    t.serving_location = r.integer("serving_location");
    t.ue_pedestrian = r.integer("ue_ped");
    t.ue_vehicular = r.integer("ue_veh");
    if (grid.side_m > 0.0) {
      t.col = static_cast<int>(std::floor((t.center.x - grid.origin.x) / grid.side_m));
      t.row = static_cast<int>(std::floor((t.center.y - grid.origin.y) / grid.side_m));
    }
    tiles.push_back(t);
  });

  for (std::size_t i = 0; i < locations.size(); ++i)
    if (locations[i].id != static_cast<int>(i)) throw IoError("locations.csv: ids must be 0..L-1 in order");
  for (std::size_t i = 0; i < tiles.size(); ++i)
    if (tiles[i].id != static_cast<int>(i)) throw IoError("tiles.csv: ids must be 0..Z-1 in order");
  for (std::size_t i = 0; i < carriers.size(); ++i)
    if (carriers[i].id != static_cast<int>(i)) throw IoError("carriers.csv: ids must be 0..C-1 in order");

  int team_count = 0;
  for (const auto& l : locations) team_count = std::max(team_count, l.team_id + 1);
  std::vector<Team> teams(team_count);
  for (int t = 0; t < team_count; ++t) teams[t].id = t;
  for (const auto& l : locations) {
    if (l.team_id < 0) throw IoError("locations.csv: negative team id");
    auto& team = teams[l.team_id];
    if (l.kind == PoaKind::Macro) {
      team.leader = l.id;
      team.members.insert(team.members.begin(), l.id);
    } else {
      team.members.push_back(l.id);
    }
  }
  try {
    return Scenario(std::move(carriers), std::move(locations), std::move(tiles), std::move(teams),
                    PowerLevelSet(std::move(fractions)), grid, traffic, *tod);
  } catch (const InvalidConfig& e) {
    throw IoError(std::string("levels.csv: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Tensor, strategy, trace

void write_attenuation(const fs::path& path, const AttenuationTensor& tensor) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "location_id,tile_id,carrier_id,gain\n";
  char buf[128];
  for (int l = 0; l < tensor.locations(); ++l)
    for (int z = 0; z < tensor.tiles(); ++z)
      for (int c = 0; c < tensor.carriers(); ++c) {
        // 17 significant digits round-trip exactly
        const int n = std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g\n", l, z, c, tensor.at(l, z, c));
        out.write(buf, n);
      }
  if (!out) throw IoError("write failed for " + path.string());
}

AttenuationTensor read_attenuation(const fs::path& path, int locations, int tiles, int carriers) {
  AttenuationTensor tensor(locations, tiles, carriers);
  std::size_t count = 0;
  for_rows(path, [&](const RowView& r) {
    const int l = r.integer("location_id"), z = r.integer("tile_id"), c = r.integer("carrier_id");
    if (l < 0 || l >= locations || z < 0 || z >= tiles || c < 0 || c >= carriers)
      throw IoError("attenuation.csv: index out of range");
    tensor.at(l, z, c) = r.num("gain");
    ++count;
  });
  if (count != tensor.size())
    throw IoError("attenuation.csv: expected " + std::to_string(tensor.size()) + " rows, got " +
                  std::to_string(count));
  return tensor;
}

void write_strategy(const fs::path& path, const Scenario& s, const StrategyProfile& profile) {
  CsvTable t{{"team_id", "location_id", "carrier_id", "fraction", "watts"}, {}};
  for (const auto& team : s.teams())
    for (int l : team.members)
      for (int c = 0; c < s.carrier_count(); ++c)
        t.rows.push_back({std::to_string(team.id), std::to_string(l), std::to_string(c),
                          format_double(profile.fraction(s, l, c)),
                          format_double(profile.radiated(s, l, c))});
  write_csv(path, t);
}

StrategyProfile read_strategy(const fs::path& path, const Scenario& s) {
  StrategyProfile profile(s.location_count(), s.carrier_count());
  const auto fractions = s.levels().fractions();
  for_rows(path, [&](const RowView& r) {
    const int l = r.integer("location_id"), c = r.integer("carrier_id");
    if (l < 0 || l >= s.location_count() || c < 0 || c >= s.carrier_count())
      throw IoError("strategy.csv: index out of range");
    const double f = r.num("fraction");
    const auto it = std::find(fractions.begin(), fractions.end(), f);
    if (it == fractions.end()) throw IoError("strategy.csv: fraction not in the level set");
    profile.set_level(l, c, static_cast<int>(it - fractions.begin()));
  });
  return profile;
}

void write_trace(const fs::path& path, std::span<const TraceRow> trace) {
  CsvTable t{{"iteration", "round", "team", "carrier", "payoff", "utility", "cost", "e_t",
              "total_watts", "changed"},
             {}};
  for (const auto& r : trace)
    t.rows.push_back({std::to_string(r.iteration), std::to_string(r.round), std::to_string(r.team),
                      std::to_string(r.carrier), format_double(r.payoff), format_double(r.utility),
                      format_double(r.cost), format_double(r.e_t), format_double(r.total_watts),
                      r.changed ? "1" : "0"});
  write_csv(path, t);
}

// ---------------------------------------------------------------------------
// Metrics and NE reports

CsvTable metrics_table(std::span<const MetricsReport> reports, const TrafficProfile& traffic) {
  CsvTable t{{"policy", "time_of_day", "metric", "poa_kind", "value"}, {}};
  for (const auto& m : reports) {
    const std::string policy(to_string(m.policy));
    const std::string tod(to_string(m.time_of_day));
    const auto add = [&](const std::string& metric, const std::string& kind, double v) {
      t.rows.push_back({policy, tod, metric, kind, format_double(v)});
    };
    add("duration_s", "All", m.duration_s);
    add("requests", "All", m.requests);
    add("completed", "All", m.completed);
    add("failed", "All", m.failed);
    add("in_flight", "All", m.in_flight);
    add("requested_bits", "All", m.requested_bits);
    add("delivered_bits", "All", m.delivered_bits);
    add("demand_met", "All", m.demand_met);
    for (std::size_t k = 0; k < m.failed_fraction_by_kind.size(); ++k) {
      const std::string name = k < traffic.catalog.size() ? traffic.catalog[k].name : std::to_string(k);
      add("failed_fraction." + name, "All", m.failed_fraction_by_kind[k]);
    }
    for (PoaKind kind : {PoaKind::Macro, PoaKind::Micro}) {
      const auto& pk = m.of(kind);
      const std::string name(to_string(kind));
      add("delivered_bits", name, pk.bits);
      add("energy_j", name, pk.energy_j);
      add("rbs_used", name, static_cast<double>(pk.rbs_used));
      add("energy_efficiency_bpj", name, pk.energy_efficiency());
      add("rb_efficiency_kb", name, pk.rb_efficiency_kb());
    }
    add("mean_ue_throughput_bps", "All", m.mean_ue_throughput_bps);
    add("active_ues", "All", m.active_ues);
    add("jain_all", "All", m.jain_all);
    add("jain_inner", "All", m.jain_inner);
    add("jain_edge", "All", m.jain_edge);
    add("inner_ues", "All", m.inner_ues);
    add("edge_ues", "All", m.edge_ues);
    for (int a = 0; a < kAreaTypeCount; ++a) {
      const std::string area(to_string(static_cast<AreaType>(a)));
      add("mean_ue_throughput_bps." + area, "All", m.area_mean_throughput_bps[a]);
      add("active_ues." + area, "All", m.area_ues[a]);
    }
    add("radiated_w", "All", m.radiated_w);
    add("game_converged", "All", m.game_converged ? 1.0 : 0.0);
  }
  return t;
}

std::string profile_hash(const StrategyProfile& profile) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(profile.locations()));
  mix(static_cast<std::uint64_t>(profile.carriers()));
  for (int v : profile.levels()) mix(static_cast<std::uint64_t>(v));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_ne_report(const fs::path& path, const Scenario& scenario, const NEReport& report) {
  CsvTable t{{"ne_index", "welfare", "is_bps_outcome", "profile_hash"}, {}};
  for (std::size_t i = 0; i < report.equilibria.size(); ++i) {
    const auto& ne = report.equilibria[i];
    t.rows.push_back({std::to_string(i), format_double(ne.welfare),
                      static_cast<int>(i) == report.bps_index ? "1" : "0",
                      profile_hash(ne.profile)});
    const auto stem = path.stem().string();
    write_strategy(path.parent_path() / (stem + "_" + std::to_string(i) + "_strategy.csv"),
                   scenario, ne.profile);
  }
  write_csv(path, t);
}

}  // namespace bps
