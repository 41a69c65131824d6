#include "bps/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bps {

double thermal_noise_w(double bandwidth_hz, double noise_figure_db) {
  return db_to_linear(-174.0 - 30.0 + noise_figure_db) * bandwidth_hz;
}

void GameParams::validate(int carrier_count) const {
  if (!(alpha > 0.0)) throw InvalidConfig("game.alpha: must be > 0");
  if (!std::isfinite(beta)) throw InvalidConfig("game.beta: must be finite");
  if (!(delta >= 0.0)) throw InvalidConfig("game.delta: must be >= 0");
  if (!(k > 0.0 && k <= 0.25)) throw InvalidConfig("game.k: must lie in (0, 0.25]");
  if (!(gamma_min > 0.0)) throw InvalidConfig("game.gamma_min: must be > 0");
  if (noise_w.size() != 1 && noise_w.size() != static_cast<std::size_t>(carrier_count))
    throw InvalidConfig("game.noise_w: need one value or one per carrier");
  for (double n : noise_w)
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidConfig("game.noise_w: must be > 0");
  if (!(tie_tolerance >= 0.0)) throw InvalidConfig("game.tie_tolerance: must be >= 0");
  if (max_rounds < 1) throw InvalidConfig("game.max_rounds: must be >= 1");
  if (threads < 1) throw InvalidConfig("game.threads: must be >= 1");
}

GameParams default_game_params(const Scenario& scenario) {
  GameParams p;
  for (const auto& carrier : scenario.carriers())
    p.noise_w.push_back(thermal_noise_w(carrier.bandwidth_hz));
  return p;
}

// ---------------------------------------------------------------------------
// StrategyProfile

StrategyProfile::StrategyProfile(int locations, int carriers)
    : locations_(locations),
      carriers_(carriers),
      levels_(static_cast<std::size_t>(locations) * carriers, 0) {}

StrategyProfile StrategyProfile::uniform(const Scenario& s, std::size_t level) {
  if (level >= s.levels().size()) throw IndexError("power level out of range");
  StrategyProfile p(s.location_count(), s.carrier_count());
  std::fill(p.levels_.begin(), p.levels_.end(), static_cast<int>(level));
  return p;
}

StrategyProfile StrategyProfile::min_power(const Scenario& s) {
  return uniform(s, s.levels().lowest_nonzero());
}

StrategyProfile StrategyProfile::max_power(const Scenario& s) {
  return uniform(s, s.levels().highest());
}

double StrategyProfile::total_radiated(const Scenario& s) const {
  double total = 0.0;
  for (int l = 0; l < locations_; ++l)
    for (int c = 0; c < carriers_; ++c) total += radiated(s, l, c);
  return total;
}

double StrategyProfile::carrier_radiated(const Scenario& s, int c) const {
  double total = 0.0;
  for (int l = 0; l < locations_; ++l) total += radiated(s, l, c);
  return total;
}

// ---------------------------------------------------------------------------
// GameModel

GameModel::GameModel(const Scenario& scenario, const AttenuationTensor& tensor)
    : scenario_(&scenario), tensor_(&tensor) {
  if (tensor.locations() != scenario.location_count() || tensor.tiles() != scenario.tile_count() ||
      tensor.carriers() != scenario.carrier_count())
    throw IndexError("attenuation tensor dimensions do not match the scenario");
  const int C = scenario.carrier_count();
  avg_gain_.assign(static_cast<std::size_t>(scenario.location_count()) * C, 0.0);
  for (int l = 0; l < scenario.location_count(); ++l) {
    const auto served = scenario.served_tiles(l);
    if (served.empty()) continue;
    for (int c = 0; c < C; ++c)
      avg_gain_[static_cast<std::size_t>(l) * C + c] =
          average_attenuation(tensor, scenario, l, c, served);
  }
  for (const auto& team : scenario.teams()) {
    std::vector<int> micros;
    for (int l : team.members)
      if (scenario.location(l).kind == PoaKind::Micro) micros.push_back(l);
    const Point centre = scenario.location(team.leader).position;
    std::sort(micros.begin(), micros.end(), [&](int a, int b) {
      const double da = distance(scenario.location(a).position, centre);
      const double db = distance(scenario.location(b).position, centre);
      return da != db ? da < db : a < b;
    });
    micro_order_.push_back(std::move(micros));
  }
}

// ---------------------------------------------------------------------------
// Interference, SINR, utility and cost

namespace {

double sigmoid(double gamma, const GameParams& p) {
  return 1.0 / (1.0 + std::exp(-p.alpha * (gamma - p.beta)));
}

std::vector<int> all_carriers(const Scenario& s) {
  std::vector<int> out(s.carrier_count());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::span<const int> scope_or_all(std::span<const int> scope, std::vector<int>& storage,
                                  const Scenario& s) {
  if (!scope.empty()) return scope;
  storage = all_carriers(s);
  return storage;
}

double external_interference(const GameModel& m, const StrategyProfile& profile, int team,
                             int tile, int carrier) {
  const Scenario& s = m.scenario();
  double total = 0.0;
  for (const auto& loc : s.locations()) {
    if (loc.team_id == team) continue;
    const double watts = profile.radiated(s, loc.id, carrier);
    if (watts != 0.0) total += watts * m.tensor().at(loc.id, tile, carrier);
  }
  return total;
}

// Evaluates team t's contribution on one carrier for any choice of member
// levels, with everything outside the team frozen.
class CarrierKernel {
 public:
  CarrierKernel(const GameModel& m, const StrategyProfile& profile, int team, int carrier,
                const GameParams& params, const PriceTable& prices,
                const std::vector<std::uint8_t>& prior_served)
      : params_(params), noise_(params.noise(carrier)) {
    const Scenario& s = m.scenario();
    const Team& t = s.team(team);
    members_ = static_cast<int>(t.members.size());
    const double e_t = t.ue_count;
    std::vector<int> slot(s.location_count(), -1);
    for (int i = 0; i < members_; ++i) slot[t.members[i]] = i;

    const auto& levels = s.levels();
    watts_.resize(static_cast<std::size_t>(members_) * levels.size());
    price_.resize(members_);
    for (int i = 0; i < members_; ++i) {
      const int l = t.members[i];
      for (std::size_t k = 0; k < levels.size(); ++k)
        watts_[i * levels.size() + k] = levels[k] * s.location(l).max_power_w;
      price_[i] = prices.at(l, carrier) * m.average_gain(l, carrier);
    }
    level_count_ = levels.size();

    for (int z : t.tiles) {
      const Tile& tile = s.tile(z);
      if (tile.ue_count() == 0) continue;
      tiles_.push_back({tile.ue_count() / e_t, slot[tile.serving_location],
                        external_interference(m, profile, team, z, carrier),
                        !prior_served.empty() && prior_served[z] != 0});
      for (int i = 0; i < members_; ++i)
        gains_.push_back(m.tensor().at(t.members[i], z, carrier));
    }
  }

  struct Result {
    double utility = 0.0;
    double power_cost = 0.0;
    double unserved = 0.0;
  };

  int members() const { return members_; }
  std::size_t level_count() const { return level_count_; }

  Result evaluate(const int* levels) const {
    double p[kMaxMembers];
    Result r;
    for (int i = 0; i < members_; ++i) {
      p[i] = watts_[i * level_count_ + levels[i]];
      r.power_cost += price_[i] * p[i];
    }
    for (std::size_t k = 0; k < tiles_.size(); ++k) {
      const TileTerm& tt = tiles_[k];
      const double* g = &gains_[k * members_];
      double intra = 0.0;
      for (int i = 0; i < members_; ++i)
        if (i != tt.serving) intra += p[i] * g[i];
      const double gamma = p[tt.serving] * g[tt.serving] / (noise_ + intra + tt.external);
      r.utility += tt.weight * sigmoid(gamma, params_);
      if (!tt.prior_served && gamma <= params_.gamma_min) r.unserved += tt.weight;
    }
    return r;
  }

  static constexpr int kMaxMembers = 16;

 private:
  struct TileTerm {
    double weight;
    int serving;
    double external;
    bool prior_served;
  };
  const GameParams& params_;
  double noise_;
  int members_ = 0;
  std::size_t level_count_ = 0;
  std::vector<double> watts_;
  std::vector<double> price_;
  std::vector<TileTerm> tiles_;
  std::vector<double> gains_;
};

// Team payoff split into the part contributed by `carrier` and the rest.
struct OtherCarriers {
  double utility = 0.0;
  double power_cost = 0.0;
};

OtherCarriers other_carrier_terms(const GameModel& m, const StrategyProfile& profile, int team,
                                  int carrier, const GameParams& params,
                                  const PriceTable& prices, std::span<const int> scope) {
  const Scenario& s = m.scenario();
  const Team& t = s.team(team);
  const double e_t = t.ue_count;
  OtherCarriers o;
  for (int c : scope) {
    if (c == carrier) continue;
    for (int l : t.members) o.power_cost += prices.at(l, c) * m.average_gain(l, c) * profile.radiated(s, l, c);
    for (int z : t.tiles) {
      const Tile& tile = s.tile(z);
      if (tile.ue_count() == 0) continue;
      o.utility += tile.ue_count() / e_t *
                   sigmoid(sinr(m, profile, team, tile.serving_location, z, c, params.noise(c)), params);
    }
  }
  return o;
}

void decode(std::size_t index, std::size_t base, int members, int* out) {
  // member 0 is the most significant digit, so index order is lexicographic
  for (int i = members - 1; i >= 0; --i) {
    out[i] = static_cast<int>(index % base);
    index /= base;
  }
}

struct Search {
  std::vector<double> payoffs;
  std::vector<CarrierKernel::Result> parts;
  OtherCarriers other;
  std::size_t candidates = 0;
  int members = 0;
  std::size_t base = 0;
};

Search evaluate_all(const GameModel& m, const StrategyProfile& profile, int team, int carrier,
                    const GameParams& params, const PriceTable& prices,
                    std::span<const int> scope, const std::vector<std::uint8_t>* prior_override) {
  std::vector<std::uint8_t> prior;
  if (prior_override) {
    prior = *prior_override;
  } else {
    std::vector<int> others;
    for (int c : scope)
      if (c != carrier) others.push_back(c);
    prior = served_tiles_mask(m, profile, params, others);
  }
  const CarrierKernel kernel(m, profile, team, carrier, params, prices, prior);
  if (kernel.members() > CarrierKernel::kMaxMembers)
    throw TooLarge("teams with more than 16 locations are not supported");

  Search search;
  search.other = other_carrier_terms(m, profile, team, carrier, params, prices, scope);
  search.members = kernel.members();
  search.base = kernel.level_count();
  search.candidates = 1;
  for (int i = 0; i < kernel.members(); ++i) {
    if (search.candidates > std::numeric_limits<std::size_t>::max() / search.base)
      throw TooLarge("strategy set too large");
    search.candidates *= search.base;
  }
  search.payoffs.resize(search.candidates);
  search.parts.resize(search.candidates);

  const std::size_t chunk = 4096;
  const std::size_t chunks = (search.candidates + chunk - 1) / chunk;
  parallel_for(chunks, params.threads, [&](std::size_t ci) {
    int levels[CarrierKernel::kMaxMembers];
    const std::size_t end = std::min(search.candidates, (ci + 1) * chunk);
    for (std::size_t i = ci * chunk; i < end; ++i) {
      decode(i, search.base, search.members, levels);
      const auto r = kernel.evaluate(levels);
      search.parts[i] = r;
      search.payoffs[i] = (search.other.utility + r.utility) -
                          (search.other.power_cost + r.power_cost + params.delta * r.unserved);
    }
  });
  return search;
}

bool within_tolerance(double best, double value, double tol) {
  return best - value <= tol * std::max(std::abs(best), std::abs(value));
}

}  // namespace

double interference(const GameModel& m, const StrategyProfile& profile, int team, int tile,
                    int carrier) {
  if (!m.scenario().tile_in_team(tile, team))
    throw IndexError("tile " + std::to_string(tile) + " is not served by team " +
                     std::to_string(team));
  return external_interference(m, profile, team, tile, carrier);
}

double sinr(const GameModel& m, const StrategyProfile& profile, int team, int location, int tile,
            int carrier, double noise_w) {
  const Scenario& s = m.scenario();
  if (s.location(location).team_id != team)
    throw IndexError("location " + std::to_string(location) + " is not in team " +
                     std::to_string(team));
  if (s.tile(tile).serving_location != location)
    throw IndexError("tile " + std::to_string(tile) + " is not served by location " +
                     std::to_string(location));
  const double external = interference(m, profile, team, tile, carrier);
  // Same summation order as the best-reply kernel so payoffs agree bit for bit.
  double intra = 0.0;
  for (int l : s.team(team).members)
    if (l != location) intra += profile.radiated(s, l, carrier) * m.tensor().at(l, tile, carrier);
  const double signal =
      profile.radiated(s, location, carrier) * m.tensor().at(location, tile, carrier);
  return signal / (noise_w + intra + external);
}

std::vector<std::uint8_t> served_tiles_mask(const GameModel& m, const StrategyProfile& profile,
                                            const GameParams& params,
                                            std::span<const int> carriers) {
  const Scenario& s = m.scenario();
  std::vector<std::uint8_t> served(s.tile_count(), 0);
  if (carriers.empty()) return served;
  for (const auto& tile : s.tiles()) {
    if (tile.ue_count() == 0) continue;
    const int team = s.location(tile.serving_location).team_id;
    for (int c : carriers) {
      if (sinr(m, profile, team, tile.serving_location, tile.id, c, params.noise(c)) >
          params.gamma_min) {
        served[tile.id] = 1;
        break;
      }
    }
  }
  return served;
}

TeamPayoff team_payoff(const GameModel& m, const StrategyProfile& profile, int team,
                       const GameParams& params, const PriceTable& prices,
                       std::span<const int> scope) {
  const Scenario& s = m.scenario();
  const Team& t = s.team(team);
  if (t.ue_count == 0) throw NoUsers("team " + std::to_string(team) + " has no UEs");
  std::vector<int> storage;
  scope = scope_or_all(scope, storage, s);
  const double e_total = t.ue_count;

  TeamPayoff out;
  std::vector<std::uint8_t> served(t.tiles.size(), 0);
  for (int c : scope) {
    for (int l : t.members)
      out.power_cost += prices.at(l, c) * m.average_gain(l, c) * profile.radiated(s, l, c);
    for (std::size_t k = 0; k < t.tiles.size(); ++k) {
      const Tile& tile = s.tile(t.tiles[k]);
      if (tile.ue_count() == 0) continue;
      const double gamma =
          sinr(m, profile, team, tile.serving_location, tile.id, c, params.noise(c));
      out.utility += tile.ue_count() / e_total * sigmoid(gamma, params);
      if (gamma > params.gamma_min) served[k] = 1;
    }
  }
  for (std::size_t k = 0; k < t.tiles.size(); ++k) {
    const Tile& tile = s.tile(t.tiles[k]);
    if (tile.ue_count() > 0 && !served[k]) out.e_t += tile.ue_count() / e_total;
  }
  out.cost = out.power_cost + params.delta * out.e_t;
  out.payoff = out.utility - out.cost;
  return out;
}

double team_utility(const GameModel& m, const StrategyProfile& profile, int team,
                    const GameParams& params, std::span<const int> scope) {
  const PriceTable zero(m.scenario().location_count(), m.scenario().carrier_count());
  return team_payoff(m, profile, team, params, zero, scope).utility;
}

std::vector<double> update_prices(const GameModel& m, const StrategyProfile& reference, int team,
                                  int carrier, const GameParams& params) {
  const Scenario& s = m.scenario();
  const Team& t = s.team(team);
  std::vector<double> xi;
  xi.reserve(t.members.size());
  for (int l : t.members) {
    const auto tiles = s.served_tiles(l);
    const double users = s.location_ue_count(l);
    double mean = 0.0;
    for (int z : tiles) {
      double internal = 0.0;
      for (int other : t.members)
        if (other != l)
          internal += reference.radiated(s, other, carrier) * m.tensor().at(other, z, carrier);
      const double total = external_interference(m, reference, team, z, carrier) + internal;
      // locations with no UEs fall back to an unweighted mean
      const double w = users > 0.0 ? s.tile(z).ue_count() / users : 1.0 / tiles.size();
      mean += w * total;
    }
    xi.push_back(mean > 0.0 ? params.k * params.alpha / mean
                            : params.k * params.alpha / (4.0 * params.noise(carrier)));
  }
  return xi;
}

PriceTable compute_prices(const GameModel& m, const StrategyProfile& reference,
                          const GameParams& params) {
  const Scenario& s = m.scenario();
  PriceTable table(s.location_count(), s.carrier_count());
  for (int c = 0; c < s.carrier_count(); ++c)
    for (const auto& team : s.teams()) {
      const auto xi = update_prices(m, reference, team.id, c, params);
      for (std::size_t i = 0; i < team.members.size(); ++i) table.at(team.members[i], c) = xi[i];
    }
  return table;
}

std::vector<std::int64_t> tie_break_key(const GameModel& m, int team,
                                        std::span<const int> carriers,
                                        std::span<const int> levels) {
  const Scenario& s = m.scenario();
  const Team& t = s.team(team);
  const std::size_t C = carriers.size();
  if (levels.size() != t.members.size() * C)
    throw IndexError("tie-break key: level matrix has the wrong size");
  const auto nano = [](double v) { return static_cast<std::int64_t>(std::llround(v * 1e9)); };
  const auto watts = [&](std::size_t i, std::size_t c) {
    return s.levels()[levels[i * C + c]] * s.location(t.members[i]).max_power_w;
  };

  std::vector<std::int64_t> key;
  // (i) lowest total power
  double total = 0.0;
  for (std::size_t i = 0; i < t.members.size(); ++i)
    for (std::size_t c = 0; c < C; ++c) total += watts(i, c);
  key.push_back(nano(total));
  // (ii) more power on micros nearer the macro
  for (int micro : m.micros_by_distance(team)) {
    const auto i = static_cast<std::size_t>(
        std::find(t.members.begin(), t.members.end(), micro) - t.members.begin());
    double fraction = 0.0;
    for (std::size_t c = 0; c < C; ++c) fraction += s.levels()[levels[i * C + c]];
    key.push_back(-nano(fraction));
  }
  // (iii) more power on higher-frequency carriers
  std::vector<std::size_t> by_freq(C);
  std::iota(by_freq.begin(), by_freq.end(), 0);
  std::stable_sort(by_freq.begin(), by_freq.end(), [&](std::size_t a, std::size_t b) {
    return s.carrier(carriers[a]).center_frequency_hz > s.carrier(carriers[b]).center_frequency_hz;
  });
  for (std::size_t c : by_freq) {
    double carrier_total = 0.0;
    for (std::size_t i = 0; i < t.members.size(); ++i) carrier_total += watts(i, c);
    key.push_back(-nano(carrier_total));
  }
  // (iv) plain lexicographic order on the matrix
  key.insert(key.end(), levels.begin(), levels.end());
  return key;
}

namespace {

BestReply select_best(const GameModel& m, int team, int carrier, const GameParams& params,
                      const Search& search) {
  const double best = *std::max_element(search.payoffs.begin(), search.payoffs.end());
  const int carriers[1] = {carrier};
  std::vector<int> levels(search.members);
  std::vector<int> chosen;
  std::vector<std::int64_t> chosen_key;
  std::size_t chosen_index = 0;
  int tied = 0;
  for (std::size_t i = 0; i < search.candidates; ++i) {
    if (!within_tolerance(best, search.payoffs[i], params.tie_tolerance)) continue;
    ++tied;
    decode(i, search.base, search.members, levels.data());
    auto key = tie_break_key(m, team, carriers, levels);
    if (chosen.empty() || key < chosen_key) {
      chosen = levels;
      chosen_key = std::move(key);
      chosen_index = i;
    }
  }
  BestReply reply;
  reply.levels = std::move(chosen);
  reply.evaluations = static_cast<std::int64_t>(search.candidates);
  reply.tied_candidates = tied;
  const auto& part = search.parts[chosen_index];
  reply.payoff.utility = search.other.utility + part.utility;
  reply.payoff.power_cost = search.other.power_cost + part.power_cost;
  reply.payoff.e_t = part.unserved;
  reply.payoff.cost = reply.payoff.power_cost + params.delta * part.unserved;
  reply.payoff.payoff = search.payoffs[chosen_index];
  return reply;
}

std::size_t encode(const StrategyProfile& profile, const Team& team, int carrier,
                   std::size_t base) {
  std::size_t index = 0;
  for (int l : team.members) index = index * base + static_cast<std::size_t>(profile.level(l, carrier));
  return index;
}

}  // namespace

BestReply best_reply(const GameModel& m, const StrategyProfile& profile, int team, int carrier,
                     const GameParams& params, const PriceTable& prices,
                     const std::vector<std::uint8_t>* prior_served) {
  const Scenario& s = m.scenario();
  if (s.team(team).ue_count == 0) throw NoUsers("team " + std::to_string(team) + " has no UEs");
  const auto scope = all_carriers(s);
  const auto search = evaluate_all(m, profile, team, carrier, params, prices, scope, prior_served);
  return select_best(m, team, carrier, params, search);
}

std::vector<int> default_team_order(const Scenario& s) {
  std::vector<int> order(s.team_count());
  std::iota(order.begin(), order.end(), 0);
  return order;
}

GameOutcome run_single_carrier_game(const GameModel& m, int carrier, const GameParams& params,
                                    std::span<const int> team_order, const PriceTable* prices,
                                    const StrategyProfile* initial) {
  const Scenario& s = m.scenario();
  params.validate(s.carrier_count());
  if (carrier < 0 || carrier >= s.carrier_count()) throw IndexError("carrier out of range");
  {
    std::vector<int> sorted(team_order.begin(), team_order.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted != default_team_order(s))
      throw InvalidConfig("team_order must be a permutation of the teams");
  }

  GameOutcome out;
  out.profile = initial ? *initial : StrategyProfile(s.location_count(), s.carrier_count());
  for (int l = 0; l < s.location_count(); ++l) out.profile.set_level(l, carrier, 0);

  if (prices) {
    out.prices = *prices;
  } else {
    StrategyProfile reference = out.profile;
    const int low = static_cast<int>(s.levels().lowest_nonzero());
    for (int l = 0; l < s.location_count(); ++l) reference.set_level(l, carrier, low);
    out.prices = PriceTable(s.location_count(), s.carrier_count());
    for (const auto& team : s.teams()) {
      const auto xi = update_prices(m, reference, team.id, carrier, params);
      for (std::size_t i = 0; i < team.members.size(); ++i)
        out.prices.at(team.members[i], carrier) = xi[i];
    }
  }

  CarrierOutcome co;
  co.carrier = carrier;
  for (int round = 1; round <= params.max_rounds; ++round) {
    bool changed = false;
    co.evaluations.emplace_back(s.team_count(), 0);
    for (int t : team_order) {
      const Team& team = s.team(t);
      if (team.ue_count == 0) continue;
      if (params.update_prices_each_iteration) {
        const auto xi = update_prices(m, out.profile, t, carrier, params);
        for (std::size_t i = 0; i < team.members.size(); ++i)
          out.prices.at(team.members[i], carrier) = xi[i];
      }
      const auto reply = best_reply(m, out.profile, t, carrier, params, out.prices);
      co.evaluations.back()[t] = reply.evaluations;
      out.evaluations += reply.evaluations;
      bool moved = false;
      for (std::size_t i = 0; i < team.members.size(); ++i) {
        if (out.profile.level(team.members[i], carrier) != reply.levels[i]) {
          out.profile.set_level(team.members[i], carrier, reply.levels[i]);
          moved = true;
        }
      }
      changed = changed || moved;
      ++co.iterations;
      TraceRow row;
      row.iteration = ++out.iterations;
      row.round = round;
      row.team = t;
      row.carrier = carrier;
      row.payoff = reply.payoff.payoff;
      row.utility = reply.payoff.utility;
      row.cost = reply.payoff.cost;
      row.e_t = reply.payoff.e_t;
      row.total_watts = out.profile.total_radiated(s);
      row.changed = moved;
      out.trace.push_back(row);
    }
    co.rounds = round;
    if (!changed) {
      co.converged = true;
      break;
    }
  }
  out.converged = co.converged;
  out.carriers.push_back(std::move(co));
  return out;
}

GameOutcome run_multi_carrier_game(const GameModel& m, const GameParams& params,
                                   int carrier_limit) {
  const Scenario& s = m.scenario();
  if (s.carrier_count() < 1) throw InvalidConfig("scenario has no carriers");
  auto order = s.carriers_by_descending_frequency();
  if (carrier_limit > 0 && carrier_limit < static_cast<int>(order.size()))
    order.resize(carrier_limit);
  const auto teams = default_team_order(s);

  GameOutcome out;
  out.profile = StrategyProfile(s.location_count(), s.carrier_count());
  out.prices = PriceTable(s.location_count(), s.carrier_count());
  out.converged = true;
  for (int c : order) {
    auto sub = run_single_carrier_game(m, c, params, teams, nullptr, &out.profile);
    out.profile = std::move(sub.profile);
    for (int l = 0; l < s.location_count(); ++l) out.prices.at(l, c) = sub.prices.at(l, c);
    for (auto& row : sub.trace) {
      row.iteration += out.iterations;
      out.trace.push_back(row);
    }
    out.iterations += sub.iterations;
    out.evaluations += sub.evaluations;
    out.converged = out.converged && sub.converged;
    out.carriers.push_back(std::move(sub.carriers.front()));
  }
  return out;
}

DeviationReport per_carrier_deviation_check(const GameModel& m, const StrategyProfile& profile,
                                            const GameParams& params, const PriceTable& prices,
                                            std::span<const int> scope) {
  const Scenario& s = m.scenario();
  std::vector<int> storage;
  scope = scope_or_all(scope, storage, s);
  DeviationReport report;
  for (const auto& team : s.teams()) {
    if (team.ue_count == 0) continue;
    for (int c : scope) {
      const auto search = evaluate_all(m, profile, team.id, c, params, prices, scope, nullptr);
      const double current = search.payoffs[encode(profile, team, c, search.base)];
      const double best = *std::max_element(search.payoffs.begin(), search.payoffs.end());
      report.checked += static_cast<std::int64_t>(search.candidates);
      const double gain = best - current;
      const double scale = std::max(std::abs(best), std::abs(current));
      const double relative = scale > 0.0 ? gain / scale : gain;
      if (!within_tolerance(best, current, params.tie_tolerance)) ++report.violations;
      if (report.worst_team < 0 || gain > report.worst_gain) {
        report.worst_gain = gain;
        report.worst_relative = relative;
        report.worst_team = team.id;
        report.worst_carrier = c;
      }
    }
  }
  return report;
}

}  // namespace bps
