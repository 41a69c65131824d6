#include "bps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace bps {

// ---------------------------------------------------------------------------
// Closed forms for the one-location game

namespace {

// Radicands within this relative distance of zero count as exactly at the bound.
constexpr double kBoundSlack = 1e-12;

double clean_radicand(double radicand, double scale) {
  if (radicand < 0.0 && radicand > -kBoundSlack * scale) return 0.0;
  return radicand;
}

}  // namespace

double scalar_payoff(double s, double interference, const ContinuousGameParams& p) {
  const double d = interference + p.noise;
  return 1.0 / (1.0 + std::exp(-p.alpha * (p.a * s / d - p.beta))) - p.xi * p.a * s;
}

std::optional<double> stationary_best_reply(double interference, const ContinuousGameParams& p) {
  const double d = interference + p.noise;
  if (p.xi <= 0.0) return std::numeric_limits<double>::infinity();
  const double x = p.alpha / (2.0 * p.xi * d) - 1.0;
  const double radicand = clean_radicand(x * x - 1.0, x * x + 1.0);
  if (radicand < 0.0 || x < 0.0) return std::nullopt;
  const double y = x - std::sqrt(radicand);
  if (!(y > 0.0)) return std::nullopt;
  const double s = -d / (p.alpha * p.a) * (std::log(y) - p.alpha * p.beta);
  if (!(s > 0.0)) return std::nullopt;
  return s;
}

ClosedFormReply closed_form_best_reply(double interference, const ContinuousGameParams& p) {
  ClosedFormReply out;
  const auto root = stationary_best_reply(interference, p);
  if (!root) {
    out.degenerate = true;
    return out;
  }
  out.clamped = *root > p.s_max;
  const double s = std::min(*root, p.s_max);
  // the sigmoid's convex part can leave w(0) above the interior maximum
  out.s = scalar_payoff(0.0, interference, p) >= scalar_payoff(s, interference, p) ? 0.0 : s;
  return out;
}

DerivativeTerms best_reply_derivative_terms(double interference, const ContinuousGameParams& p) {
  const double d = interference + p.noise;
  const double radicand = clean_radicand(p.alpha * (p.alpha - 4.0 * p.xi * d), p.alpha * p.alpha);
  if (radicand < 0.0)
    throw DomainError("price above alpha/(4(I+N)): no real best reply");
  const double x = p.alpha / (2.0 * p.xi * d) - 1.0;
  const double root = std::sqrt(std::max(0.0, x * x - 1.0));
  DerivativeTerms t;
  t.beta_term = p.beta / p.a;
  t.root_term = radicand == 0.0 ? -std::numeric_limits<double>::infinity()
                                : -1.0 / (p.a * std::sqrt(radicand));
  t.log_term = -std::log(x - root) / (p.alpha * p.a);
  return t;
}

double best_reply_derivative(double interference, const ContinuousGameParams& p) {
  const auto t = best_reply_derivative_terms(interference, p);
  return t.beta_term + t.root_term + t.log_term;
}

BestReplyPayoff payoff_along_best_reply(double interference, const ContinuousGameParams& p) {
  const double d = interference + p.noise;
  const double radicand =
      clean_radicand(p.alpha * p.alpha - 4.0 * p.alpha * p.xi * d, p.alpha * p.alpha);
  if (radicand < 0.0) throw DomainError("price above alpha/(4(I+N)): no real best reply");
  const auto s = stationary_best_reply(interference, p);
  if (!s) throw DomainError("no stationary best reply");
  BestReplyPayoff out;
  out.utility = 2.0 * p.xi * d / (p.alpha - std::sqrt(radicand));
  out.payoff = out.utility - p.xi * p.a * *s;
  return out;
}

double grid_best_reply(double interference, const ContinuousGameParams& p, int points) {
  if (points < 2) throw InvalidConfig("grid needs at least two points");
  double best_s = 0.0;
  double best_w = scalar_payoff(0.0, interference, p);
  for (int i = 1; i < points; ++i) {
    const double s = p.s_max * i / (points - 1);
    const double w = scalar_payoff(s, interference, p);
    if (w > best_w) {
      best_w = w;
      best_s = s;
    }
  }
  return best_s;
}

double discrete_best_reply(double interference, const ContinuousGameParams& p,
                           std::span<const double> fractions, double tie_tolerance) {
  std::vector<double> w(fractions.size());
  for (std::size_t i = 0; i < fractions.size(); ++i)
    w[i] = scalar_payoff(fractions[i] * p.s_max, interference, p);
  const double best = *std::max_element(w.begin(), w.end());
  for (std::size_t i = 0; i < fractions.size(); ++i)  // ascending power: first hit is lowest
    if (best - w[i] <= tie_tolerance * std::max(std::abs(best), std::abs(w[i])))
      return fractions[i] * p.s_max;
  return 0.0;
}

SweepResult scalar_sweep(const ContinuousGameParams& p, std::span<const double> fractions,
                         std::span<const double> interference) {
  SweepResult out;
  for (double i : interference) {
    const double r = discrete_best_reply(i, p, fractions);
    if (!out.reply.empty()) {
      if (r > out.reply.back()) ++out.increases;
      if (r < out.reply.back()) ++out.decreases;
    }
    out.interference.push_back(i);
    out.reply.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Toys

std::vector<double> even_levels(int n) {
  if (n < 2) throw InvalidConfig("need at least two power levels");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = static_cast<double>(i) / (n - 1);
  out.back() = 1.0;
  return out;
}

std::string Toy::describe() const {
  std::ostringstream os;
  int max_members = 0;
  for (const auto& t : scenario.teams())
    max_members = std::max(max_members, static_cast<int>(t.members.size()));
  os << "seed=" << seed << " teams=" << scenario.team_count() << " L=" << max_members
     << " |P|=" << scenario.levels().size() << " C=" << scenario.carrier_count()
     << " tiles=" << scenario.tile_count();
  return os.str();
}

Toy random_toy(std::uint64_t seed, const ToyRanges& r) {
  Rng rng = make_rng(seed, 11);
  const auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int teams = pick(r.min_teams, r.max_teams);
  const int locations = pick(r.min_locations, r.max_locations);
  const int levels = pick(r.min_levels, r.max_levels);
  const int carriers = pick(r.min_carriers, r.max_carriers);

  ScenarioConfig cfg;
  cfg.inter_site_distance_m = 200.0;
  cfg.macro_count = teams;
  cfg.micros_per_cell = locations - 1;
  cfg.micro_radius_m = 20.0;
  cfg.tile_count.reset();
  cfg.tile_side_m = r.tile_side_m;
  const std::vector<CarrierSpec> bands{{2.6e9, 10e6}, {1.8e9, 10e6}, {0.8e9, 10e6}};
  cfg.carriers.assign(bands.begin(), bands.begin() + carriers);
  cfg.power_levels = even_levels(levels);

  Toy toy;
  toy.seed = seed;
  Scenario base = build_scenario(cfg, seed);
  std::vector<int> ped(base.tile_count()), veh(base.tile_count(), 0);
  std::uniform_int_distribution<int> ues(0, 10);
  for (auto& n : ped) n = ues(rng);
  for (const auto& team : base.teams()) {
    int total = 0;
    for (int z : team.tiles) total += ped[z];
    if (total == 0 && !team.tiles.empty()) ped[team.tiles.front()] = 1;
  }
  toy.scenario = base.with_ue_counts(ped, veh, TimeOfDay::Morning);
  toy.tensor = build_attenuation_tensor(toy.scenario, cfg.propagation, seed);
  toy.params = default_game_params(toy.scenario);
  if (r.random_prices) {
    toy.params.k = std::uniform_real_distribution<double>(0.05, 0.25)(rng);
    toy.params.delta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  return toy;
}

Toy symmetric_pair_toy(int locations_per_team, int levels, int carriers) {
  if (locations_per_team < 1 || locations_per_team > 3)
    throw InvalidConfig("symmetric toy supports 1 to 3 locations per team");
  const double side = 50.0;
  TileGrid grid{{-300.0, -100.0}, side, 12, 4};

  std::vector<Location> locs;
  std::vector<Team> teams(2);
  for (int t = 0; t < 2; ++t) {
    teams[t].id = t;
    teams[t].leader = t;
    teams[t].members.push_back(t);
  }
  const double sign[2] = {-1.0, 1.0};
  for (int t = 0; t < 2; ++t) locs.push_back({t, PoaKind::Macro, {sign[t] * 200.0, 0.0}, 20.0, t});
  const Point micro_offsets[2] = {{-90.0, 40.0}, {60.0, -60.0}};
  for (int m = 0; m + 1 < locations_per_team; ++m)
    for (int t = 0; t < 2; ++t) {
      const int id = static_cast<int>(locs.size());
      // mirror image across x = 0
      locs.push_back({id, PoaKind::Micro,
                      {sign[t] * (200.0 + micro_offsets[m].x), micro_offsets[m].y}, 1.0, t});
      teams[t].members.push_back(id);
    }

  std::vector<Carrier> cs;
  const double freqs[3] = {2.6e9, 1.8e9, 0.8e9};
  for (int c = 0; c < carriers; ++c) cs.push_back({c, freqs[c], 10e6});

  std::vector<Tile> tiles;
  for (int row = 0; row < grid.rows; ++row)
    for (int col = 0; col < grid.cols; ++col) {
      Tile tile;
      tile.id = static_cast<int>(tiles.size());
      tile.col = col;
      tile.row = row;
      tile.side_m = side;
      tile.center = {grid.origin.x + (col + 0.5) * side, grid.origin.y + (row + 0.5) * side};
      // mirrored counts: depend on |x| and row only
      const int mirror_col = std::min(col, grid.cols - 1 - col);
      tile.ue_pedestrian = (mirror_col * 3 + row * 5) % 7;
      tile.area = AreaType::Residential;
      tiles.push_back(tile);
    }

  PropagationModel model;
  model.macro.shadow_sigma_db = 0.0;
  model.micro.shadow_sigma_db = 0.0;
  Scenario provisional(cs, locs, tiles, teams, PowerLevelSet(even_levels(levels)), grid,
                       TrafficProfile{}, TimeOfDay::Morning);
  Toy toy;
  toy.scenario = provisional.with_association(associate_tiles(provisional, model));
  toy.tensor = build_attenuation_tensor(toy.scenario, model, 0);
  toy.params = default_game_params(toy.scenario);
  return toy;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

std::vector<int> resolve_scope(const Scenario& s, std::span<const int> scope) {
  if (!scope.empty()) return {scope.begin(), scope.end()};
  std::vector<int> all(s.carrier_count());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

std::uint64_t checked_pow(std::uint64_t base, int exp, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

// All strategies of one team over the scope carriers, with everything that
// does not depend on the opponents precomputed.
class TeamTable {
 public:
  TeamTable(const GameModel& m, int team, const GameParams& params, const PriceTable& prices,
            const std::vector<int>& scope, std::uint64_t limit)
      : params_(params), scope_(scope) {
    const Scenario& s = m.scenario();
    const Team& t = s.team(team);
    members_ = t.members;
    const int C = static_cast<int>(scope.size());
    const std::size_t P = s.levels().size();
    cells_ = static_cast<int>(members_.size()) * C;
    const std::uint64_t count = checked_pow(P, cells_, limit);
    if (count > limit) throw TooLarge("team strategy set exceeds the enumeration limit");
    strategies_ = static_cast<std::size_t>(count);
    base_ = P;

    for (int z : t.tiles)
      if (s.tile(z).ue_count() > 0) tiles_.push_back(z);
    for (int z : tiles_) weights_.push_back(s.tile(z).ue_count() / static_cast<double>(t.ue_count));
    for (int c : scope) noise_.push_back(params.noise(c));

    const std::size_t K = tiles_.size();
    signal_.resize(strategies_ * K * C);
    intra_.resize(strategies_ * K * C);
    power_cost_.resize(strategies_);
    std::vector<int> lv(cells_);
    for (std::size_t o = 0; o < strategies_; ++o) {
      levels_of(o, lv.data());
      double pc = 0.0;
      for (int ci = 0; ci < C; ++ci)
        for (std::size_t i = 0; i < members_.size(); ++i) {
          const int l = members_[i];
          const double w = s.levels()[lv[i * C + ci]] * s.location(l).max_power_w;
          pc += prices.at(l, scope[ci]) * m.average_gain(l, scope[ci]) * w;
        }
      power_cost_[o] = pc;
      for (std::size_t k = 0; k < K; ++k) {
        const int z = tiles_[k];
        const int serving = s.tile(z).serving_location;
        for (int ci = 0; ci < C; ++ci) {
          double sig = 0.0, intra = 0.0;
          for (std::size_t i = 0; i < members_.size(); ++i) {
            const int l = members_[i];
            const double w = s.levels()[lv[i * C + ci]] * s.location(l).max_power_w;
            const double rx = w * m.tensor().at(l, z, scope[ci]);
            if (l == serving) sig = rx; else intra += rx;
          }
          signal_[(o * K + k) * C + ci] = sig;
          intra_[(o * K + k) * C + ci] = intra;
        }
      }
    }
  }

  std::size_t strategies() const { return strategies_; }
  std::size_t tile_count() const { return tiles_.size(); }
  int carrier_count() const { return static_cast<int>(scope_.size()); }
  std::span<const int> tiles() const { return tiles_; }
  std::span<const int> members() const { return members_; }

  // member-major, carriers in scope order; member 0 / first carrier most significant
  void levels_of(std::size_t o, int* out) const {
    for (int i = cells_ - 1; i >= 0; --i) {
      out[i] = static_cast<int>(o % base_);
      o /= base_;
    }
  }
  std::size_t index_of(const StrategyProfile& profile) const {
    std::size_t o = 0;
    for (int l : members_)
      for (int c : scope_) o = o * base_ + static_cast<std::size_t>(profile.level(l, c));
    return o;
  }

  // external[k * C + ci]: interference from other teams at tile k on carrier ci
  double payoff(std::size_t o, const double* external) const {
    const std::size_t K = tiles_.size();
    const int C = carrier_count();
    double u = 0.0, unserved = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      bool served = false;
      for (int ci = 0; ci < C; ++ci) {
        const std::size_t idx = (o * K + k) * C + ci;
        const double gamma = signal_[idx] / (noise_[ci] + intra_[idx] + external[k * C + ci]);
        u += weights_[k] / (1.0 + std::exp(-params_.alpha * (gamma - params_.beta)));
        served = served || gamma > params_.gamma_min;
      }
      if (!served) unserved += weights_[k];
    }
    return u - (power_cost_[o] + params_.delta * unserved);
  }

 private:
  const GameParams& params_;
  std::vector<int> scope_;
  std::vector<int> members_;
  int cells_ = 0;
  std::size_t base_ = 0;
  std::size_t strategies_ = 0;
  std::vector<int> tiles_;
  std::vector<double> weights_;
  std::vector<double> noise_;
  std::vector<double> signal_, intra_, power_cost_;
};

// Received power at `target` team's tiles from team `source` playing strategy o.
std::vector<double> contribution_table(const GameModel& m, const TeamTable& source,
                                       const TeamTable& target, const std::vector<int>& scope) {
  const Scenario& s = m.scenario();
  const std::size_t K = target.tile_count();
  const int C = static_cast<int>(scope.size());
  std::vector<double> out(source.strategies() * K * C, 0.0);
  std::vector<int> lv(source.members().size() * C);
  for (std::size_t o = 0; o < source.strategies(); ++o) {
    source.levels_of(o, lv.data());
    for (std::size_t k = 0; k < K; ++k)
      for (int ci = 0; ci < C; ++ci) {
        double sum = 0.0;
        for (std::size_t i = 0; i < source.members().size(); ++i) {
          const int l = source.members()[i];
          sum += s.levels()[lv[i * C + ci]] * s.location(l).max_power_w *
                 m.tensor().at(l, target.tiles()[k], scope[ci]);
        }
        out[(o * K + k) * C + ci] = sum;
      }
  }
  return out;
}

bool close(double best, double value, double tol) {
  return best - value <= tol * std::max(std::abs(best), std::abs(value));
}

}  // namespace

std::uint64_t joint_profile_count(const Scenario& s, std::span<const int> scope) {
  const auto sc = resolve_scope(s, scope);
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 2;
  std::uint64_t total = 1;
  for (const auto& team : s.teams()) {
    if (team.ue_count == 0) continue;
    const auto n = checked_pow(s.levels().size(),
                               static_cast<int>(team.members.size() * sc.size()), cap);
    if (n > cap || total > cap / n) return cap;
    total *= n;
  }
  return total;
}

double social_welfare(const GameModel& m, const StrategyProfile& profile,
                      const GameParams& params, const PriceTable& prices,
                      std::span<const int> scope) {
  double total = 0.0;
  for (const auto& team : m.scenario().teams())
    if (team.ue_count > 0) total += team_payoff(m, profile, team.id, params, prices, scope).payoff;
  return total;
}

double network_mean_payoff(const GameModel& m, const StrategyProfile& profile,
                           const GameParams& params, const PriceTable& prices) {
  double total = 0.0;
  int n = 0;
  for (const auto& team : m.scenario().teams())
    if (team.ue_count > 0) {
      total += team_payoff(m, profile, team.id, params, prices).payoff;
      ++n;
    }
  if (n == 0) throw NoUsers("no team has UEs");
  return total / n;
}

NEReport enumerate_pure_ne(const GameModel& m, const GameParams& params, const PriceTable& prices,
                           std::span<const int> scope_in, const StrategyProfile* bps_outcome,
                           std::uint64_t limit) {
  const Scenario& s = m.scenario();
  const auto scope = resolve_scope(s, scope_in);
  const std::uint64_t joint = joint_profile_count(s, scope);
  if (joint > limit)
    throw TooLarge("joint strategy space has " + std::to_string(joint) + " profiles (limit " +
                   std::to_string(limit) + ")");

  std::vector<int> active;
  for (const auto& team : s.teams())
    if (team.ue_count > 0) active.push_back(team.id);
  std::vector<TeamTable> tables;
  for (int t : active) tables.emplace_back(m, t, params, prices, scope, limit);
  const std::size_t A = active.size();
  // mixed radix: first active team is the least significant digit
  std::vector<std::size_t> stride(A, 1);
  for (std::size_t i = 1; i < A; ++i) stride[i] = stride[i - 1] * tables[i - 1].strategies();

  std::vector<std::uint8_t> is_ne(static_cast<std::size_t>(joint), 1);
  const int C = static_cast<int>(scope.size());
  for (std::size_t ti = 0; ti < A; ++ti) {
    const TeamTable& me = tables[ti];
    std::vector<std::vector<double>> contrib(A);
    for (std::size_t oi = 0; oi < A; ++oi)
      if (oi != ti) contrib[oi] = contribution_table(m, tables[oi], me, scope);
    const std::size_t K = me.tile_count();
    const std::size_t opponents = static_cast<std::size_t>(joint) / me.strategies();
    const std::size_t chunk = 256;
    parallel_for((opponents + chunk - 1) / chunk, params.threads, [&](std::size_t ci) {
      std::vector<double> external(K * C);
      std::vector<double> w(me.strategies());
      std::vector<std::size_t> digit(A, 0);
      for (std::size_t opp = ci * chunk; opp < std::min(opponents, (ci + 1) * chunk); ++opp) {
        std::size_t rest = opp, base_index = 0;
        for (std::size_t oi = 0; oi < A; ++oi) {
          if (oi == ti) continue;
          digit[oi] = rest % tables[oi].strategies();
          rest /= tables[oi].strategies();
          base_index += digit[oi] * stride[oi];
        }
        std::fill(external.begin(), external.end(), 0.0);
        for (std::size_t oi = 0; oi < A; ++oi) {
          if (oi == ti) continue;
          const double* src = &contrib[oi][digit[oi] * K * C];
          for (std::size_t e = 0; e < K * C; ++e) external[e] += src[e];
        }
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t o = 0; o < me.strategies(); ++o) {
          w[o] = me.payoff(o, external.data());
          best = std::max(best, w[o]);
        }
        for (std::size_t o = 0; o < me.strategies(); ++o)
          if (!close(best, w[o], params.tie_tolerance)) is_ne[base_index + o * stride[ti]] = 0;
      }
    });
  }

  NEReport report;
  report.joint_profiles = joint;
  report.bps_supplied = bps_outcome != nullptr;
  for (std::size_t j = 0; j < is_ne.size(); ++j) {
    if (!is_ne[j]) continue;
    StrategyProfile profile(s.location_count(), s.carrier_count());
    std::size_t rest = j;
    for (std::size_t ti = 0; ti < A; ++ti) {
      const std::size_t o = rest % tables[ti].strategies();
      rest /= tables[ti].strategies();
      std::vector<int> lv(tables[ti].members().size() * C);
      tables[ti].levels_of(o, lv.data());
      for (std::size_t i = 0; i < tables[ti].members().size(); ++i)
        for (int c = 0; c < C; ++c) profile.set_level(tables[ti].members()[i], scope[c], lv[i * C + c]);
    }
    NashEquilibrium ne;
    ne.profile = profile;
    for (int t : active) {
      ne.payoffs.push_back(team_payoff(m, profile, t, params, prices, scope).payoff);
      ne.welfare += ne.payoffs.back();
    }
    report.equilibria.push_back(std::move(ne));
  }
  for (std::size_t i = 0; i < report.equilibria.size(); ++i) {
    if (report.max_welfare_index < 0 ||
        report.equilibria[i].welfare > report.equilibria[report.max_welfare_index].welfare)
      report.max_welfare_index = static_cast<int>(i);
  }
  if (bps_outcome) {
    report.bps_welfare = social_welfare(m, *bps_outcome, params, prices, scope);
    for (std::size_t i = 0; i < report.equilibria.size(); ++i) {
      bool same = true;
      for (int t : active)
        for (int l : s.team(t).members)
          for (int c : scope)
            same = same && report.equilibria[i].profile.level(l, c) == bps_outcome->level(l, c);
      if (same) report.bps_index = static_cast<int>(i);
    }
  }
  return report;
}

DeviationReport joint_deviation_check(const GameModel& m, const StrategyProfile& profile,
                                      const GameParams& params, const PriceTable& prices,
                                      std::span<const int> scope_in, std::uint64_t limit) {
  const Scenario& s = m.scenario();
  const auto scope = resolve_scope(s, scope_in);
  const int C = static_cast<int>(scope.size());
  DeviationReport report;
  for (const auto& team : s.teams()) {
    if (team.ue_count == 0) continue;
    const TeamTable table(m, team.id, params, prices, scope, limit);
    std::vector<double> external(table.tile_count() * C);
    for (std::size_t k = 0; k < table.tile_count(); ++k)
      for (int ci = 0; ci < C; ++ci)
        external[k * C + ci] = interference(m, profile, team.id, table.tiles()[k], scope[ci]);
    const double current = table.payoff(table.index_of(profile), external.data());
    double best = current;
    for (std::size_t o = 0; o < table.strategies(); ++o)
      best = std::max(best, table.payoff(o, external.data()));
    report.checked += static_cast<std::int64_t>(table.strategies());
    const double gain = best - current;
    const double scale = std::max(std::abs(best), std::abs(current));
    if (!close(best, current, params.tie_tolerance)) ++report.violations;
    if (report.worst_team < 0 || gain > report.worst_gain) {
      report.worst_gain = gain;
      report.worst_relative = scale > 0.0 ? gain / scale : gain;
      report.worst_team = team.id;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Strategic substitutes

namespace {

std::vector<double> induced_interference(const GameModel& m, const StrategyProfile& profile,
                                         int team) {
  const Scenario& s = m.scenario();
  std::vector<double> out;
  for (int z : s.team(team).tiles)
    for (int c = 0; c < s.carrier_count(); ++c) out.push_back(interference(m, profile, team, z, c));
  return out;
}

double frobenius(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

std::vector<double> reply_matrix(const GameModel& m, StrategyProfile profile, int team,
                                 const GameParams& params, const PriceTable& prices) {
  const Scenario& s = m.scenario();
  const Team& t = s.team(team);
  for (int l : t.members)
    for (int c = 0; c < s.carrier_count(); ++c) profile.set_level(l, c, 0);
  const std::vector<std::uint8_t> none(s.tile_count(), 0);
  std::vector<double> watts;
  for (int c = 0; c < s.carrier_count(); ++c) {
    const auto reply = best_reply(m, profile, team, c, params, prices, &none);
    for (std::size_t i = 0; i < t.members.size(); ++i)
      watts.push_back(s.levels()[reply.levels[i]] * s.location(t.members[i]).max_power_w);
  }
  return watts;
}

}  // namespace

SubstitutesReport check_strategic_substitutes(const GameModel& m, const GameParams& params,
                                              const PriceTable& prices, int sample_count,
                                              std::uint64_t seed) {
  const Scenario& s = m.scenario();
  std::vector<int> active;
  for (const auto& team : s.teams())
    if (team.ue_count > 0) active.push_back(team.id);
  SubstitutesReport report;
  if (active.empty()) return report;
  const int P = static_cast<int>(s.levels().size());
  for (int k = 0; k < sample_count; ++k) {
    Rng rng = make_rng(seed, 21, static_cast<std::uint64_t>(k));
    const int team = active[k % active.size()];
    StrategyProfile low(s.location_count(), s.carrier_count());
    StrategyProfile high = low;
    const bool dominated = std::bernoulli_distribution(0.5)(rng);
    for (const auto& loc : s.locations()) {
      if (loc.team_id == team) continue;
      for (int c = 0; c < s.carrier_count(); ++c) {
        const int a = std::uniform_int_distribution<int>(0, P - 1)(rng);
        const int b = dominated ? std::uniform_int_distribution<int>(a, P - 1)(rng)
                                : std::uniform_int_distribution<int>(0, P - 1)(rng);
        low.set_level(loc.id, c, a);
        high.set_level(loc.id, c, b);
      }
    }
    ++report.samples;
    const auto i_low = induced_interference(m, low, team);
    const auto i_high = induced_interference(m, high, team);
    bool ordered = true, strict = false;
    for (std::size_t e = 0; e < i_low.size(); ++e) {
      if (i_high[e] < i_low[e]) ordered = false;
      if (i_high[e] > i_low[e]) strict = true;
    }
    if (!ordered || !strict) {
      ++report.skipped_incomparable;
      continue;
    }
    ++report.compared;
    const double n_low = frobenius(reply_matrix(m, low, team, params, prices));
    const double n_high = frobenius(reply_matrix(m, high, team, params, prices));
    if (n_high > n_low * (1.0 + 1e-12))
      report.violations.push_back({k, team, n_low, n_high, frobenius(i_low), frobenius(i_high)});
  }
  return report;
}

}  // namespace bps
