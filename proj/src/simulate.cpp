#include "bps/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bps {

namespace {
constexpr std::uint64_t kStreamTraffic = 31;
constexpr std::uint64_t kStreamFading = 32;
constexpr double kRbBitsPerEfficiency = kResourceBlockBandwidthHz * 1e-3;  // 1 ms TTI
}  // namespace

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::BPS: return "BPS";
    case Policy::MaxPower: return "MaxPower";
    case Policy::MinPower: return "MinPower";
    case Policy::EicicLite: return "EicicLite";
  }
  return "?";
}

std::optional<Policy> parse_policy(std::string_view text) {
  if (text == "BPS" || text == "bps") return Policy::BPS;
  if (text == "MaxPower" || text == "max") return Policy::MaxPower;
  if (text == "MinPower" || text == "min") return Policy::MinPower;
  if (text == "EicicLite" || text == "eicic") return Policy::EicicLite;
  return std::nullopt;
}

RateTable RateTable::cqi_default() {
  RateTable t;
  t.efficiency = {0.15, 0.23, 0.38, 0.60, 0.88, 1.18, 1.48, 1.91,
                  2.41, 2.73, 3.32, 3.90, 4.52, 5.12, 5.55};
  const double lo = -6.5, hi = 19.8;
  for (std::size_t i = 0; i < t.efficiency.size(); ++i)
    t.sinr_db.push_back(lo + (hi - lo) * static_cast<double>(i) / (t.efficiency.size() - 1));
  return t;
}

void RateTable::validate() const {
  if (sinr_db.empty() || sinr_db.size() != efficiency.size())
    throw InvalidConfig("simulation.rate_table: breakpoints and rates must be non-empty and aligned");
  for (std::size_t i = 0; i < sinr_db.size(); ++i) {
    if (!std::isfinite(sinr_db[i]) || !(efficiency[i] >= 0.0))
      throw InvalidConfig("simulation.rate_table: entries must be finite and nonnegative");
    if (i > 0 && (!(sinr_db[i] > sinr_db[i - 1]) || efficiency[i] < efficiency[i - 1]))
      throw InvalidConfig("simulation.rate_table: must be ascending and non-decreasing");
  }
}

double sinr_to_rate(double gamma, const RateTable& table) {
  if (!(gamma > 0.0)) return 0.0;
  const double db = linear_to_db(gamma);
  const auto it = std::upper_bound(table.sinr_db.begin(), table.sinr_db.end(), db);
  if (it == table.sinr_db.begin()) return 0.0;
  return table.efficiency[static_cast<std::size_t>(it - table.sinr_db.begin()) - 1] *
         kRbBitsPerEfficiency;
}

void EnergyModel::validate() const {
  for (const auto* e : {&macro, &micro})
    if (!(e->static_w >= 0.0) || !(e->slope >= 0.0))
      throw InvalidConfig("simulation.energy: P0 and slope must be >= 0");
}

double energy_consumed(const EnergyModel& model, PoaKind kind, std::span<const double> radiated_w,
                       double duration_s) {
  const auto& e = model.of(kind);
  const double radiated = std::accumulate(radiated_w.begin(), radiated_w.end(), 0.0);
  return (e.static_w + e.slope * radiated) * duration_s;
}

AreaType cell_area(const Scenario& s, int team) {
  PerArea<int> counts{};
  for (int z : s.team(team).tiles) ++counts[static_cast<int>(s.tile(z).area)];
  return static_cast<AreaType>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::vector<DownloadRequest> generate_traffic(const Scenario& s, const TrafficProfile& profile,
                                              double duration_s, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw InvalidConfig("duration must be > 0");
  std::vector<double> kind_p;
  for (const auto& k : profile.catalog) kind_p.push_back(k.probability);

  std::vector<DownloadRequest> out;
  for (const auto& team : s.teams()) {
    const double lambda = profile.lambda(cell_area(s, team.id), s.time_of_day());
    if (!(lambda > 0.0) || team.ue_count == 0) continue;
    std::vector<double> weights;
    for (int z : team.tiles) weights.push_back(s.tile(z).ue_count());
    Rng rng = make_rng(seed, kStreamTraffic, static_cast<std::uint64_t>(team.id));
    std::exponential_distribution<double> gap(lambda);
    std::discrete_distribution<int> pick_tile(weights.begin(), weights.end());
    std::discrete_distribution<int> pick_kind(kind_p.begin(), kind_p.end());
    for (double t = gap(rng); t < duration_s; t += gap(rng)) {
      DownloadRequest r;
      r.cell = team.id;
      r.arrival_s = t;
      r.tile = team.tiles[pick_tile(rng)];
      r.ue = std::uniform_int_distribution<int>(0, s.tile(r.tile).ue_count() - 1)(rng);
      r.kind = pick_kind(rng);
      r.size_bits = profile.catalog[r.kind].size_bits;
      r.deadline_s = profile.catalog[r.kind].deadline_s;
      out.push_back(r);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const DownloadRequest& a, const DownloadRequest& b) {
    return a.arrival_s < b.arrival_s;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<int> pf_schedule(std::span<const PfCandidate> candidates, int rb_budget,
                             double tau_tti, double epsilon) {
  std::vector<int> rbs(candidates.size(), 0);
  std::vector<double> served(candidates.size(), 0.0);
  for (int rb = 0; rb < rb_budget; ++rb) {
    int best = -1;
    double best_metric = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto& c = candidates[i];
      if (!(c.bits_per_rb > 0.0) || served[i] >= c.remaining_bits) continue;
      const double metric =
          c.bits_per_rb / std::max(epsilon, c.average_rate + served[i] / tau_tti);
      if (best < 0 || metric > best_metric) {
        best = static_cast<int>(i);
        best_metric = metric;
      }
    }
    if (best < 0) break;
    ++rbs[best];
    served[best] += candidates[best].bits_per_rb;
  }
  return rbs;
}

double jain_index(std::span<const double> values) {
  if (values.empty()) throw InvalidConfig("jain_index needs at least one value");
  double sum = 0.0, sq = 0.0;
  for (double v : values) {
    if (v < 0.0) throw DomainError("jain_index: negative value");
    sum += v;
    sq += v * v;
  }
  if (sq == 0.0) throw AllZero("jain_index: all values are zero");
  return sum * sum / (static_cast<double>(values.size()) * sq);
}

bool is_abs_tti(std::int64_t tti, double abs_fraction) {
  if (!(abs_fraction > 0.0)) return false;
  // evenly spread: exactly floor(n * fraction) muted TTIs among the first n
  return std::floor((tti + 1) * abs_fraction + 1e-9) > std::floor(tti * abs_fraction + 1e-9);
}

void SimulationConfig::validate(int carrier_count) const {
  if (!(duration_s > 0.0)) throw InvalidConfig("simulation.duration_s: must be > 0");
  if (!(tti_s > 0.0)) throw InvalidConfig("simulation.tti_s: must be > 0");
  if (!(update_period_s >= tti_s)) throw InvalidConfig("simulation.update_period_s: must be >= tti_s");
  if (duration_s + 1e-12 < update_period_s)
    throw InvalidConfig("simulation.duration_s: must cover at least one update period");
  if (!(abs_fraction >= 0.0 && abs_fraction < 1.0))
    throw InvalidConfig("simulation.abs_fraction: must lie in [0, 1)");
  if (!(pf_tau_tti >= 1.0)) throw InvalidConfig("simulation.pf_tau_tti: must be >= 1");
  if (!(pf_epsilon > 0.0)) throw InvalidConfig("simulation.pf_epsilon: must be > 0");
  rates.validate();
  energy.validate();
  propagation.validate();
  game.validate(carrier_count);
}

PolicyStrategy policy_strategy(const Scenario& scenario, const AttenuationTensor& tensor,
                               Policy policy, const SimulationConfig& config) {
  PolicyStrategy out;
  out.scenario = scenario;
  switch (policy) {
    case Policy::MaxPower:
      out.profile = StrategyProfile::max_power(scenario);
      break;
    case Policy::MinPower:
      out.profile = StrategyProfile::min_power(scenario);
      break;
    case Policy::EicicLite:
      out.scenario =
          scenario.with_association(associate_tiles(scenario, config.propagation, config.cre_bias_db));
      out.profile = StrategyProfile::max_power(scenario);
      break;
    case Policy::BPS: {
      const GameModel model(scenario, tensor);
      auto game = run_multi_carrier_game(model, config.game, config.carrier_limit);
      out.profile = std::move(game.profile);
      out.converged = game.converged;
      break;
    }
  }
  if (config.carrier_limit > 0) {
    const auto order = scenario.carriers_by_descending_frequency();
    for (std::size_t i = static_cast<std::size_t>(config.carrier_limit); i < order.size(); ++i)
      for (int l = 0; l < scenario.location_count(); ++l) out.profile.set_level(l, order[i], 0);
  }
  return out;
}

namespace {

struct Active {
  const DownloadRequest* request;
  int ue;  // global UE index
  double remaining;
  double average = 0.0;
};

}  // namespace

MetricsReport run_simulation(const Scenario& scenario, const AttenuationTensor& tensor,
                             Policy policy, const SimulationConfig& config, std::uint64_t seed) {
  config.validate(scenario.carrier_count());
  const auto strategy = policy_strategy(scenario, tensor, policy, config);
  const Scenario& s = strategy.scenario;
  const StrategyProfile& profile = strategy.profile;
  const int L = s.location_count();
  const int C = s.carrier_count();
  const int Z = s.tile_count();
  const bool eicic = policy == Policy::EicicLite;

  std::vector<int> carriers = s.carriers_by_descending_frequency();
  if (config.carrier_limit > 0 && config.carrier_limit < C) carriers.resize(config.carrier_limit);

  // Per-RB rates per tile and carrier, for normal and ABS subframes.
  std::vector<double> rate[2];
  for (int state = 0; state < (eicic ? 2 : 1); ++state) {
    rate[state].assign(static_cast<std::size_t>(Z) * C, 0.0);
    for (const auto& tile : s.tiles()) {
      if (tile.ue_count() == 0) continue;
      for (int c : carriers) {
        const auto watts = [&](int l) {
          const bool muted = state == 1 && s.location(l).kind == PoaKind::Macro;
          return muted ? 0.0 : profile.radiated(s, l, c);
        };
        const int serving = tile.serving_location;
        double interference = config.game.noise(c);
        for (int l = 0; l < L; ++l)
          if (l != serving) interference += watts(l) * tensor.at(l, tile.id, c);
        const double gamma = watts(serving) * tensor.at(serving, tile.id, c) / interference;
        rate[state][static_cast<std::size_t>(tile.id) * C + c] = sinr_to_rate(gamma, config.rates);
      }
    }
  }

  // Inner/edge split on the reference carrier.
  std::vector<std::uint8_t> edge(Z, 0);
  {
    const int ref = s.reference_carrier();
    for (const auto& tile : s.tiles()) {
      const int serving = tile.serving_location;
      const double own = s.location(serving).max_power_w * tensor.at(serving, tile.id, ref);
      double best_other = 0.0;
      for (int l = 0; l < L; ++l)
        if (l != serving)
          best_other = std::max(best_other, s.location(l).max_power_w * tensor.at(l, tile.id, ref));
      edge[tile.id] = best_other > 0.0 && own / best_other < db_to_linear(config.edge_threshold_db);
    }
  }

  std::vector<int> ue_offset(Z + 1, 0);
  for (int z = 0; z < Z; ++z) ue_offset[z + 1] = ue_offset[z] + s.tile(z).ue_count();
  const int total_ues = ue_offset[Z];

  const auto requests = generate_traffic(scenario, s.traffic(), config.duration_s, seed);
  const std::int64_t ttis = std::llround(config.duration_s / config.tti_s);
  const std::int64_t period_ttis = std::max<std::int64_t>(1, std::llround(config.update_period_s / config.tti_s));
  const bool fading = config.propagation.vehicular_fast_fading && config.propagation.fast_fading_sigma_db > 0.0;

  MetricsReport m;
  m.policy = policy;
  m.time_of_day = s.time_of_day();
  m.duration_s = config.duration_s;
  m.requests = static_cast<int>(requests.size());
  m.game_converged = strategy.converged;
  m.radiated_w = profile.total_radiated(s);
  std::vector<int> kind_total(s.traffic().catalog.size(), 0), kind_failed(kind_total.size(), 0);

  std::vector<double> ue_bits(total_ues, 0.0);
  std::vector<std::int64_t> ue_active_ttis(total_ues, 0);
  std::vector<std::int64_t> ue_last_tti(total_ues, -1);
  std::vector<Active> active;
  std::vector<std::vector<std::size_t>> by_location(L);
  std::vector<PfCandidate> candidates;
  std::vector<double> fade_db;
  std::size_t next = 0;
  std::vector<double> rbs_by_cell(static_cast<std::size_t>(L) * C, 0.0);

  for (std::int64_t k = 0; k < ttis; ++k) {
    const double t0 = k * config.tti_s;
    const double t1 = t0 + config.tti_s;
    const bool abs = eicic && is_abs_tti(k, config.abs_fraction);
    if (fading && k % period_ttis == 0) {
      fade_db.assign(total_ues, 0.0);
      for (int z = 0; z < Z; ++z)
        for (int u = s.tile(z).ue_pedestrian; u < s.tile(z).ue_count(); ++u) {
          Rng rng = make_rng(seed, kStreamFading, static_cast<std::uint64_t>(k / period_ttis),
                             static_cast<std::uint64_t>(ue_offset[z] + u));
          fade_db[ue_offset[z] + u] =
              std::normal_distribution<double>(0.0, config.propagation.fast_fading_sigma_db)(rng);
        }
    }

    while (next < requests.size() && requests[next].arrival_s < t1) {
      const auto& r = requests[next++];
      active.push_back({&r, ue_offset[r.tile] + r.ue, r.size_bits});
      m.requested_bits += r.size_bits;
      ++kind_total[r.kind];
    }
    // deadline expiry
    for (std::size_t i = 0; i < active.size();) {
      const auto& a = active[i];
      if (t0 >= a.request->arrival_s + a.request->deadline_s) {
        ++m.failed;
        ++kind_failed[a.request->kind];
        active[i] = active.back();
        active.pop_back();
      } else {
        ++i;
      }
    }
    if (active.empty()) continue;
    // keep a stable service order regardless of removals
    std::sort(active.begin(), active.end(),
              [](const Active& a, const Active& b) { return a.request->id < b.request->id; });

    for (auto& v : by_location) v.clear();
    for (std::size_t i = 0; i < active.size(); ++i)
      by_location[s.tile(active[i].request->tile).serving_location].push_back(i);

    std::vector<double> served(active.size(), 0.0);
    for (int l = 0; l < L; ++l) {
      if (by_location[l].empty()) continue;
      const PoaKind kind = s.location(l).kind;
      if (abs && kind == PoaKind::Macro) continue;
      auto& kind_metrics = kind == PoaKind::Macro ? m.macro : m.micro;
      for (int c : carriers) {
        candidates.clear();
        for (std::size_t i : by_location[l]) {
          const auto& a = active[i];
          double bits_per_rb = rate[abs ? 1 : 0][static_cast<std::size_t>(a.request->tile) * C + c];
          if (fading && a.request->ue >= s.tile(a.request->tile).ue_pedestrian && bits_per_rb > 0.0) {
            // re-evaluate the step lookup with the faded SINR
            const double base_db = [&] {
              const int serving = l;
              double interference = config.game.noise(c);
              for (int o = 0; o < L; ++o)
                if (o != serving) {
                  const bool muted = abs && s.location(o).kind == PoaKind::Macro;
                  interference += (muted ? 0.0 : profile.radiated(s, o, c)) * tensor.at(o, a.request->tile, c);
                }
              return linear_to_db(profile.radiated(s, serving, c) * tensor.at(serving, a.request->tile, c) /
                                  interference);
            }();
            bits_per_rb = sinr_to_rate(db_to_linear(base_db + fade_db[a.ue]), config.rates);
          }
          candidates.push_back({bits_per_rb, a.average, a.remaining - served[i]});
        }
        const auto rbs = pf_schedule(candidates, s.carrier(c).rb_count(), config.pf_tau_tti,
                                     config.pf_epsilon);
        for (std::size_t j = 0; j < rbs.size(); ++j) {
          if (rbs[j] == 0) continue;
          const std::size_t i = by_location[l][j];
          const double capacity = rbs[j] * candidates[j].bits_per_rb;
          const double bits = std::min(capacity, active[i].remaining - served[i]);
          served[i] += bits;
          m.delivered_upper_bound_bits += capacity;
          kind_metrics.bits += bits;
          kind_metrics.rbs_used += rbs[j];
          rbs_by_cell[static_cast<std::size_t>(l) * C + c] += rbs[j];
        }
      }
    }

    for (std::size_t i = 0; i < active.size(); ++i) {
      auto& a = active[i];
      a.remaining -= served[i];
      a.average = (1.0 - 1.0 / config.pf_tau_tti) * a.average + served[i] / config.pf_tau_tti;
      m.delivered_bits += served[i];
      ue_bits[a.ue] += served[i];
      if (ue_last_tti[a.ue] != k) {
        ue_last_tti[a.ue] = k;
        ++ue_active_ttis[a.ue];
      }
    }
    for (std::size_t i = 0; i < active.size();) {
      if (active[i].remaining <= 1e-9) {
        ++m.completed;
        active[i] = active.back();
        active.pop_back();
      } else {
        ++i;
      }
    }
  }
  // requests still queued or never reached count as in flight
  m.in_flight = static_cast<int>(active.size() + (requests.size() - next));
  for (std::size_t i = next; i < requests.size(); ++i) {
    m.requested_bits += requests[i].size_bits;
    ++kind_total[requests[i].kind];
  }

  m.demand_met = m.requested_bits > 0.0 ? m.delivered_bits / m.requested_bits : 1.0;
  for (std::size_t k = 0; k < kind_total.size(); ++k)
    m.failed_fraction_by_kind.push_back(
        kind_total[k] > 0 ? static_cast<double>(kind_failed[k]) / kind_total[k] : 0.0);

  for (int l = 0; l < L; ++l) {
    const auto& loc = s.location(l);
    // load-dependent draw scales with the share of resource blocks in use
    std::vector<double> watts;
    for (int c : carriers) {
      const double capacity = static_cast<double>(s.carrier(c).rb_count()) * ttis;
      const double used = rbs_by_cell[static_cast<std::size_t>(l) * C + c];
      watts.push_back(capacity > 0.0 ? profile.radiated(s, l, c) * used / capacity : 0.0);
    }
    const double joules = energy_consumed(config.energy, loc.kind, watts, config.duration_s);
    (loc.kind == PoaKind::Macro ? m.macro : m.micro).energy_j += joules;
  }

  std::vector<double> all, inner, edge_v;
  PerArea<double> area_sum{};
  double sum = 0.0;
  for (int z = 0; z < Z; ++z)
    for (int u = 0; u < s.tile(z).ue_count(); ++u) {
      const int g = ue_offset[z] + u;
      if (ue_active_ttis[g] == 0) continue;
      const double tput = ue_bits[g] / (ue_active_ttis[g] * config.tti_s);
      all.push_back(tput);
      (edge[z] ? edge_v : inner).push_back(tput);
      area_sum[static_cast<int>(s.tile(z).area)] += tput;
      ++m.area_ues[static_cast<int>(s.tile(z).area)];
      sum += tput;
    }
  const auto jain_or = [](const std::vector<double>& v) {
    if (v.empty()) return 1.0;
    try {
      return jain_index(v);
    } catch (const AllZero&) {
      return 0.0;
    }
  };
  m.active_ues = static_cast<int>(all.size());
  m.mean_ue_throughput_bps = all.empty() ? 0.0 : sum / all.size();
  m.jain_all = jain_or(all);
  m.jain_inner = jain_or(inner);
  m.jain_edge = jain_or(edge_v);
  m.inner_ues = static_cast<int>(inner.size());
  m.edge_ues = static_cast<int>(edge_v.size());
  for (int a = 0; a < kAreaTypeCount; ++a)
    m.area_mean_throughput_bps[a] = m.area_ues[a] > 0 ? area_sum[a] / m.area_ues[a] : 0.0;
  return m;
}

}  // namespace bps
