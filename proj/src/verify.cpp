#include "bps/verify.hpp"

#include <algorithm>
#include <cmath>

#include "bps/csv_io.hpp"

namespace bps {

namespace {

constexpr std::uint64_t kStreamClosedForm = 41;
constexpr std::uint64_t kStreamSweeps = 42;
constexpr std::uint64_t kStreamPriceBound = 43;

std::string toy_name(const Toy& toy) { return "toy" + std::to_string(toy.seed); }

bool relative_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

// Toys are independent; build and check them in parallel, then emit rows in
// seed order so reports do not depend on the thread count.
template <typename F>
std::vector<CheckRow> per_toy(const VerifyOptions& o, int count, const ToyRanges& ranges, F&& body) {
  std::vector<std::vector<CheckRow>> rows(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(rows.size(), o.threads, [&](std::size_t i) {
    const Toy toy = random_toy(o.seed + i, ranges);
    rows[i] = body(toy);
  });
  std::vector<CheckRow> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::uint64_t ipow(std::uint64_t base, std::size_t exp) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) v *= base;
  return v;
}

// Random one-tile scalar game; xi is left to the caller.
ContinuousGameParams draw_scalar(Rng& rng, double& interference) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ContinuousGameParams p;
  p.alpha = 0.5 + 1.5 * u(rng);
  p.beta = 0.5 + 1.5 * u(rng);
  p.a = std::pow(10.0, -3.0 + 3.0 * u(rng));
  p.noise = std::pow(10.0, -2.0 + 2.0 * u(rng));
  interference = 2.0 * u(rng);
  p.s_max = 1.0;
  // keep the unconstrained optimum roughly on the same scale as s_max
  const double d = interference + p.noise;
  p.s_max = d / p.a * (p.beta + 4.0 / p.alpha) * (0.5 + u(rng));
  return p;
}

}  // namespace

int VerifyReport::violations() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) {
    return !r.informational && !r.pass;
  }));
}

int VerifyReport::checks() const {
  return static_cast<int>(
      std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.informational; }));
}

int VerifyReport::count(const std::string& check, bool passed) const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const CheckRow& r) {
    return !r.informational && r.check == check && r.pass == passed;
  }));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"ne", "substitutes", "closedform", "welfare"};
  return names;
}

// ---------------------------------------------------------------------------

VerifyReport verify_ne(const VerifyOptions& o) {
  VerifyReport report{"ne", {}};
  report.rows = per_toy(o, o.toys, o.ranges, [&](const Toy& toy) {
    std::vector<CheckRow> rows;
    const auto name = toy_name(toy);
    GameParams params = toy.params;
    params.threads = 1;
    const GameModel model(toy.scenario, toy.tensor);
    const auto outcome = run_multi_carrier_game(model, params);

    int rounds = 0;
    for (const auto& c : outcome.carriers) rounds = std::max(rounds, c.rounds);
    rows.push_back({"ne", "converged", name, outcome.converged ? 1.0 : 0.0, 1.0, outcome.converged,
                    false, toy.describe()});
    rows.push_back({"ne", "rounds_within_5", name, static_cast<double>(rounds), 5.0,
                    outcome.converged && rounds <= 5, false, ""});

    if (outcome.converged) {
      const auto dev = per_carrier_deviation_check(model, outcome.profile, params, outcome.prices);
      rows.push_back({"ne", "deviation_certificate", name, dev.worst_relative,
                      params.tie_tolerance, dev.violations == 0, false,
                      "checked=" + std::to_string(dev.checked) +
                          " worst_team=" + std::to_string(dev.worst_team) +
                          " worst_carrier=" + std::to_string(dev.worst_carrier)});
      const auto joint = joint_deviation_check(model, outcome.profile, params, outcome.prices);
      rows.push_back({"ne", "joint_deviation", name, joint.worst_relative, params.tie_tolerance,
                      joint.violations == 0, true,
                      "gain=" + format_double(joint.worst_gain)});
    }

    // Every team with users costs exactly |P|^L evaluations per carrier per
    // round: C * |P|^L per round across the carriers it plays.
    const auto& s = toy.scenario;
    const std::uint64_t P = s.levels().size();
    bool exact = true;
    std::uint64_t per_round_total = 0;
    for (const auto& team : s.teams()) {
      if (team.ue_count == 0) continue;
      const std::uint64_t expected = ipow(P, team.members.size());
      for (const auto& c : outcome.carriers)
        for (const auto& round : c.evaluations)
          exact = exact && static_cast<std::uint64_t>(round[team.id]) == expected;
      per_round_total = std::max(per_round_total, expected * outcome.carriers.size());
    }
    const std::uint64_t joint_space = [&] {
      std::uint64_t worst = 0;
      for (const auto& team : s.teams())
        worst = std::max(worst, ipow(P, team.members.size() * outcome.carriers.size()));
      return worst;
    }();
    rows.push_back({"ne", "evaluation_count", name, static_cast<double>(per_round_total),
                    static_cast<double>(joint_space), exact, false,
                    "per-round C*|P|^L vs |P|^(L*C)=" + std::to_string(joint_space)});
    return rows;
  });
  return report;
}

VerifyReport verify_welfare(const VerifyOptions& o) {
  VerifyReport report{"welfare", {}};
  report.rows = per_toy(o, o.toys, o.ranges, [&](const Toy& toy) {
    std::vector<CheckRow> rows;
    const auto name = toy_name(toy);
    GameParams params = toy.params;
    params.threads = 1;
    const GameModel model(toy.scenario, toy.tensor);
    const auto outcome = run_multi_carrier_game(model, params);
    if (!outcome.converged) {
      rows.push_back({"welfare", "max_welfare_ne", name, 0.0, 0.0, true, true, "not converged; skipped"});
      return rows;
    }
    NEReport ne;
    try {
      ne = enumerate_pure_ne(model, params, outcome.prices, {}, &outcome.profile);
    } catch (const TooLarge& e) {
      rows.push_back({"welfare", "max_welfare_ne", name, 0.0, 0.0, true, true,
                      std::string("not enumerable; ") + e.what()});
      return rows;
    }
    const double best =
        ne.max_welfare_index >= 0 ? ne.equilibria[ne.max_welfare_index].welfare : 0.0;
    const std::string detail = "carriers=" + std::to_string(toy.scenario.carrier_count()) +
                               " equilibria=" + std::to_string(ne.equilibria.size()) +
                               " bps_is_ne=" + (ne.bps_index >= 0 ? "1" : "0") +
                               " bps_welfare=" + format_double(ne.bps_welfare) +
                               " max_welfare=" + format_double(best);
    if (ne.equilibria.size() < 2) {
      rows.push_back({"welfare", "max_welfare_ne", name, static_cast<double>(ne.equilibria.size()), 2.0,
                      true, true, "fewer than two pure equilibria; " + detail});
      return rows;
    }
    const bool pass = ne.bps_index >= 0 && relative_close(ne.bps_welfare, best, params.tie_tolerance);
    rows.push_back({"welfare", "max_welfare_ne", name, ne.bps_welfare - best, params.tie_tolerance, pass,
                    false, detail});
    return rows;
  });

  // Fixed-strategy ordering on two-tier toys, judged in aggregate.
  ToyRanges two_tier = o.ranges;
  two_tier.min_locations = std::max(2, two_tier.min_locations);
  two_tier.max_locations = std::max(two_tier.min_locations, two_tier.max_locations);
  VerifyOptions shifted = o;
  shifted.seed = o.seed + 100000;
  auto fixed = per_toy(shifted, o.fixed_strategy_toys, two_tier, [&](const Toy& toy) {
    const GameModel model(toy.scenario, toy.tensor);
    const auto& s = toy.scenario;
    const auto prices = compute_prices(model, StrategyProfile::min_power(s), toy.params);
    const double w_min = network_mean_payoff(model, StrategyProfile::min_power(s), toy.params, prices);
    const double w_max = network_mean_payoff(model, StrategyProfile::max_power(s), toy.params, prices);
    return std::vector<CheckRow>{{"welfare", "min_vs_max_instance", toy_name(toy), w_min - w_max,
                                  0.0, w_min >= w_max, true,
                                  "min=" + format_double(w_min) + " max=" + format_double(w_max)}};
  });
  int wins = 0;
  for (const auto& r : fixed) wins += r.pass;
  const double share = fixed.empty() ? 1.0 : static_cast<double>(wins) / fixed.size();
  report.rows.insert(report.rows.end(), fixed.begin(), fixed.end());
  report.rows.push_back({"welfare", "min_vs_max", "aggregate", share, 0.95, share >= 0.95, false,
                         std::to_string(wins) + "/" + std::to_string(fixed.size())});
  return report;
}

VerifyReport verify_closedform(const VerifyOptions& o) {
  VerifyReport report{"closedform", {}};
  constexpr int kGrid = 100000;
  std::vector<std::vector<CheckRow>> rows(static_cast<std::size_t>(std::max(o.draws, 0)));
  parallel_for(rows.size(), o.threads, [&](std::size_t k) {
    Rng rng = make_rng(o.seed, kStreamClosedForm, k);
    double I = 0.0;
    ContinuousGameParams p = draw_scalar(rng, I);
    const double bound = price_bound(I, p);
    // strictly inside the bound so the derivative is finite
    p.xi = bound * std::uniform_real_distribution<double>(0.02, 0.98)(rng);
    const auto name = "draw" + std::to_string(k);

    const auto cf = closed_form_best_reply(I, p);
    const double grid = grid_best_reply(I, p, kGrid);
    const double step = p.s_max / (kGrid - 1);
    rows[k].push_back({"closedform", "grid_agreement", name, std::abs(cf.s - grid) / step, 1.0,
                       std::abs(cf.s - grid) <= step * (1.0 + 1e-9), false,
                       "closed=" + format_double(cf.s) + " grid=" + format_double(grid)});

    // central difference on the unclamped stationary point
    const double d = I + p.noise;
    const double h = 1e-5 * d;
    const auto up = stationary_best_reply(I + h, p);
    const auto down = stationary_best_reply(std::max(0.0, I - h), p);
    if (up && down) {
      const double fd = (*up - *down) / ((I + h) - std::max(0.0, I - h));
      const auto terms = best_reply_derivative_terms(I, p);
      const double exact = terms.beta_term + terms.root_term + terms.log_term;
      const double scale = std::max({std::abs(exact), std::abs(terms.beta_term),
                                     std::abs(terms.root_term), std::abs(terms.log_term)});
      const double rel = std::abs(fd - exact) / scale;
      rows[k].push_back({"closedform", "derivative_fd", name, rel, 1e-6, rel <= 1e-6, false,
                         "exact=" + format_double(exact) + " fd=" + format_double(fd)});
    }

    // price-bound equivalence: below, above and exactly on the bound
    Rng brng = make_rng(o.seed, kStreamPriceBound, k);
    const double factor = k % 10 == 0 ? 1.0 : std::uniform_real_distribution<double>(0.5, 1.5)(brng);
    ContinuousGameParams q = p;
    q.xi = factor == 1.0 ? p.alpha / (4.0 * d) : bound * factor;
    const auto root = stationary_best_reply(I, q);
    const bool inside = q.xi <= price_bound(I, q) * (1.0 + 1e-12);
    const bool real_positive = root.has_value() && *root > 0.0;
    rows[k].push_back({"closedform", "price_bound_iff", name, q.xi / price_bound(I, q), 1.0,
                       inside == real_positive, false,
                       std::string("inside=") + (inside ? "1" : "0") +
                           " real_positive=" + (real_positive ? "1" : "0")});
  });
  for (auto& r : rows) report.rows.insert(report.rows.end(), r.begin(), r.end());
  return report;
}

VerifyReport verify_substitutes(const VerifyOptions& o) {
  VerifyReport report{"substitutes", {}};
  std::vector<std::vector<CheckRow>> rows(static_cast<std::size_t>(std::max(o.sweeps, 0)));
  parallel_for(rows.size(), o.threads, [&](std::size_t k) {
    Rng rng = make_rng(o.seed, kStreamSweeps, k);
    double I0 = 0.0;
    ContinuousGameParams p = draw_scalar(rng, I0);
    const int n_levels = std::uniform_int_distribution<int>(2, 11)(rng);
    const auto fractions = even_levels(n_levels);
    std::vector<double> sweep(200);
    const double top = std::pow(10.0, std::uniform_real_distribution<double>(0.0, 3.0)(rng)) * p.noise;
    for (std::size_t i = 0; i < sweep.size(); ++i)
      sweep[i] = top * static_cast<double>(i) / (sweep.size() - 1);
    const auto name = "sweep" + std::to_string(k);

    ContinuousGameParams priced = p;
    priced.xi = price_bound(0.0, p) * std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const auto down = scalar_sweep(priced, fractions, sweep);
    rows[k].push_back({"substitutes", "nonincreasing_priced", name,
                       static_cast<double>(down.increases), 0.0, down.increases == 0, false,
                       "levels=" + std::to_string(n_levels) + " xi=" + format_double(priced.xi)});

    ContinuousGameParams free = p;
    free.xi = 0.0;
    const auto up = scalar_sweep(free, fractions, sweep);
    rows[k].push_back({"substitutes", "nondecreasing_free", name,
                       static_cast<double>(up.decreases), 0.0, up.decreases == 0, false,
                       "levels=" + std::to_string(n_levels)});
  });
  for (auto& r : rows) report.rows.insert(report.rows.end(), r.begin(), r.end());

  auto team_rows = per_toy(o, o.substitutes_toys, o.ranges, [&](const Toy& toy) {
    const GameModel model(toy.scenario, toy.tensor);
    const auto prices =
        compute_prices(model, StrategyProfile::min_power(toy.scenario), toy.params);
    const auto r = check_strategic_substitutes(model, toy.params, prices, o.substitutes_samples,
                                               toy.seed);
    return std::vector<CheckRow>{{"substitutes", "team_frobenius", toy_name(toy),
                                  static_cast<double>(r.violations.size()), 0.0,
                                  r.violations.empty(), true,
                                  "compared=" + std::to_string(r.compared) +
                                      " skipped=" + std::to_string(r.skipped_incomparable)}};
  });
  report.rows.insert(report.rows.end(), team_rows.begin(), team_rows.end());
  return report;
}

VerifyReport run_suite(const std::string& suite, const VerifyOptions& options) {
  if (suite == "ne") return verify_ne(options);
  if (suite == "welfare") return verify_welfare(options);
  if (suite == "closedform") return verify_closedform(options);
  if (suite == "substitutes") return verify_substitutes(options);
  throw InvalidConfig("unknown suite '" + suite + "'");
}

void write_verify_report(const std::filesystem::path& path, const VerifyReport& report) {
  CsvTable t{{"suite", "check", "instance", "value", "threshold", "pass", "informational", "detail"},
             {}};
  for (const auto& r : report.rows) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    t.rows.push_back({r.suite, r.check, r.instance, format_double(r.value),
                      format_double(r.threshold), r.pass ? "1" : "0", r.informational ? "1" : "0",
                      detail});
  }
  write_csv(path, t);
}

}  // namespace bps
