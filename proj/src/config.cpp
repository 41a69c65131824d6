#include "bps/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace bps {

namespace {

using nlohmann::json;

// Walks one JSON object, tracking which keys were consumed so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw InvalidConfig(where() + ": expected an object");
  }
  ~Section() = default;

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json* take(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (const json* v = take(key)) out = convert<T>(*v, key_path(key));
  }
  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (const json* v = take(key)) out = convert<T>(*v, key_path(key));
  }

  Section child(const std::string& key) {
    const json* v = take(key);
    static const json empty = json::object();
    return Section(v ? *v : empty, key_path(key));
  }

  void finish() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key()))
        throw InvalidConfig(key_path(item.key()) + ": unknown key");
  }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw InvalidConfig(where + ": expected true/false");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw InvalidConfig(where + ": expected an integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw InvalidConfig(where + ": expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw InvalidConfig(where + ": expected a string");
      return v.get<std::string>();
    } else {
      // vector<double>
      if (!v.is_array()) throw InvalidConfig(where + ": expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(convert<typename T::value_type>(v[i], where + "[" + std::to_string(i) + "]"));
      return out;
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

AreaType area_key(const std::string& text, const std::string& where) {
  if (auto a = parse_area_type(text)) return *a;
  throw InvalidConfig(where + ": unknown area type '" + text + "'");
}

TimeOfDay tod_key(const std::string& text, const std::string& where) {
  if (auto t = parse_time_of_day(text)) return *t;
  throw InvalidConfig(where + ": unknown time of day '" + text + "'");
}

void read_per_area(Section& parent, const std::string& key, PerArea<double>& out) {
  const json* v = parent.take(key);
  if (!v) return;
  const auto where = parent.key_path(key);
  if (!v->is_object()) throw InvalidConfig(where + ": expected an object keyed by area type");
  for (const auto& item : v->items()) {
    const auto sub = where + "." + item.key();
    out[static_cast<int>(area_key(item.key(), sub))] = Section::convert<double>(item.value(), sub);
  }
}

void read_per_tod_area(Section& parent, const std::string& key,
                       PerTimeOfDay<PerArea<double>>& out) {
  const json* v = parent.take(key);
  if (!v) return;
  const auto where = parent.key_path(key);
  if (!v->is_object()) throw InvalidConfig(where + ": expected an object keyed by time of day");
  for (const auto& item : v->items()) {
    const auto sub = where + "." + item.key();
    const int t = static_cast<int>(tod_key(item.key(), sub));
    if (!item.value().is_object()) throw InvalidConfig(sub + ": expected an object");
    for (const auto& inner : item.value().items()) {
      const auto leaf = sub + "." + inner.key();
      out[t][static_cast<int>(area_key(inner.key(), leaf))] =
          Section::convert<double>(inner.value(), leaf);
    }
  }
}

void read_path_loss(Section& parent, const std::string& key, PathLossParams& p) {
  if (!parent.has(key)) return;
  auto s = parent.child(key);
  s.read("intercept_db", p.intercept_db);
  s.read("exponent", p.exponent);
  s.read("shadow_sigma_db", p.shadow_sigma_db);
  s.finish();
}

void read_energy(Section& parent, const std::string& key, PoaEnergy& e) {
  if (!parent.has(key)) return;
  auto s = parent.child(key);
  s.read("static_w", e.static_w);
  s.read("slope", e.slope);
  s.finish();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  auto& sc = cfg.scenario;
  Section root(doc, "");

  if (root.has("geometry")) {
    auto g = root.child("geometry");
    g.read("inter_site_distance_m", sc.inter_site_distance_m);
    g.read("macro_count", sc.macro_count);
    g.read("micros_per_cell", sc.micros_per_cell);
    g.read("micro_radius_m", sc.micro_radius_m);
    g.read("micro_placement_retries", sc.micro_placement_retries);
    g.finish();
  }
  if (root.has("tiles")) {
    auto t = root.child("tiles");
    std::optional<int> count;
    std::optional<double> side;
    t.read("count", count);
    t.read("side_m", side);
    if (side) {
      sc.tile_side_m = side;
      sc.tile_count = count;  // both set is rejected by validation
    } else if (count) {
      sc.tile_count = count;
    }
    t.read("cols", sc.tile_cols);
    t.read("rows", sc.tile_rows);
    t.read("max_ues_per_tile", sc.max_ues_per_tile);
    t.finish();
  }
  if (const json* v = root.take("carriers")) {
    if (!v->is_array()) throw InvalidConfig("carriers: expected an array");
    sc.carriers.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      Section c((*v)[i], "carriers[" + std::to_string(i) + "]");
      CarrierSpec spec;
      if (!c.has("freq_hz")) throw InvalidConfig(c.key_path("freq_hz") + ": required");
      if (!c.has("bandwidth_hz")) throw InvalidConfig(c.key_path("bandwidth_hz") + ": required");
      c.read("freq_hz", spec.frequency_hz);
      c.read("bandwidth_hz", spec.bandwidth_hz);
      c.finish();
      sc.carriers.push_back(spec);
    }
  }
  if (root.has("power")) {
    auto p = root.child("power");
    p.read("levels", sc.power_levels);
    p.read("macro_max_w", sc.macro_max_w);
    p.read("micro_max_w", sc.micro_max_w);
    p.finish();
  }
  if (root.has("traffic")) {
    auto t = root.child("traffic");
    auto& tp = sc.traffic;
    read_per_area(t, "baseline_density", tp.baseline_density);
    read_per_area(t, "vehicle_share", tp.vehicle_share);
    read_per_tod_area(t, "density_weight", tp.density_weight);
    read_per_tod_area(t, "arrival_rate", tp.arrival_rate);
    t.read("hotspot_factor", tp.hotspot_factor);
    t.read("hotspot_radius_m", tp.hotspot_radius_m);
    if (const json* v = t.take("catalog")) {
      if (!v->is_array()) throw InvalidConfig("traffic.catalog: expected an array");
      tp.catalog.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        Section k((*v)[i], "traffic.catalog[" + std::to_string(i) + "]");
        ContentKind kind;
        k.read("name", kind.name);
        k.read("size_bits", kind.size_bits);
        k.read("deadline_s", kind.deadline_s);
        k.read("probability", kind.probability);
        k.finish();
        tp.catalog.push_back(kind);
      }
    }
    std::string tod;
    t.read("time_of_day", tod);
    if (!tod.empty()) cfg.time_of_day = tod_key(tod, "traffic.time_of_day");
    t.finish();
  }
  if (const json* v = root.take("areas")) {
    if (!v->is_array()) throw InvalidConfig("areas: expected an array");
    sc.areas.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      Section a((*v)[i], "areas[" + std::to_string(i) + "]");
      AreaRing ring;
      std::string name;
      a.read("area", name);
      ring.area = area_key(name, a.key_path("area"));
      a.read("outer_radius_fraction", ring.outer_radius_fraction);
      a.finish();
      sc.areas.push_back(ring);
    }
  }
  if (root.has("propagation")) {
    auto p = root.child("propagation");
    auto& pm = sc.propagation;
    read_path_loss(p, "macro", pm.macro);
    read_path_loss(p, "micro", pm.micro);
    p.read("reference_frequency_hz", pm.reference_frequency_hz);
    p.read("min_distance_m", pm.min_distance_m);
    p.read("frequency_coefficient_db", pm.frequency_coefficient_db);
    p.read("vehicular_fast_fading", pm.vehicular_fast_fading);
    p.read("fast_fading_sigma_db", pm.fast_fading_sigma_db);
    p.finish();
  }
  if (root.has("game")) {
    auto g = root.child("game");
    auto& gp = cfg.game;
    g.read("alpha", gp.alpha);
    g.read("beta", gp.beta);
    g.read("delta", gp.delta);
    g.read("k", gp.k);
    g.read("gamma_min_db", gp.gamma_min_db);
    g.read("noise_figure_db", gp.noise_figure_db);
    g.read("tie_tolerance", gp.tie_tolerance);
    g.read("max_rounds", gp.max_rounds);
    g.read("update_prices_each_iteration", gp.update_prices_each_iteration);
    g.finish();
  }
  if (root.has("simulation")) {
    auto s = root.child("simulation");
    auto& sim = cfg.simulation;
    s.read("duration_s", sim.duration_s);
    s.read("tti_s", sim.tti_s);
    s.read("update_period_s", sim.update_period_s);
    s.read("cre_bias_db", sim.cre_bias_db);
    s.read("abs_fraction", sim.abs_fraction);
    s.read("pf_tau_tti", sim.pf_tau_tti);
    s.read("pf_epsilon", sim.pf_epsilon);
    s.read("edge_threshold_db", sim.edge_threshold_db);
    if (s.has("rate_table")) {
      auto r = s.child("rate_table");
      r.read("sinr_db", sim.rates.sinr_db);
      r.read("efficiency", sim.rates.efficiency);
      r.finish();
    }
    if (s.has("energy")) {
      auto e = s.child("energy");
      read_energy(e, "macro", sim.energy.macro);
      read_energy(e, "micro", sim.energy.micro);
      e.finish();
    }
    s.finish();
  }
  root.finish();

  sc.validate();
  cfg.simulation.rates.validate();
  cfg.simulation.energy.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

GameParams game_params(const RunConfig& config, const Scenario& scenario, int threads) {
  GameParams p;
  p.alpha = config.game.alpha;
  p.beta = config.game.beta;
  p.delta = config.game.delta;
  p.k = config.game.k;
  p.gamma_min = db_to_linear(config.game.gamma_min_db);
  p.tie_tolerance = config.game.tie_tolerance;
  p.max_rounds = config.game.max_rounds;
  p.update_prices_each_iteration = config.game.update_prices_each_iteration;
  p.threads = threads;
  for (const auto& c : scenario.carriers())
    p.noise_w.push_back(thermal_noise_w(c.bandwidth_hz, config.game.noise_figure_db));
  p.validate(scenario.carrier_count());
  return p;
}

SimulationConfig simulation_config(const RunConfig& config, const Scenario& scenario,
                                   int threads) {
  SimulationConfig s = config.simulation;
  s.game = game_params(config, scenario, threads);
  s.propagation = config.scenario.propagation;
  return s;
}

}  // namespace bps
