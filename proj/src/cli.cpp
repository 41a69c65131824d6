#include "bps/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "bps/config.hpp"
#include "bps/csv_io.hpp"
#include "bps/verify.hpp"

namespace bps {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

// Options shared by the subcommands; each one registers the subset it uses.
struct Flags {
  std::string config;
  std::string scenario;
  std::string out;
  std::uint64_t seed = 1;
  int carriers = 0;
  std::string policy;
  double duration_s = 60.0;
  int threads = 0;
  std::string time_of_day;
  bool compare = false;
  std::string suite;
  int toys = 200;
  std::uint64_t verify_seed = 1000;
  std::string manifest;
};

struct Loaded {
  RunConfig config;
  Scenario scenario;
  AttenuationTensor tensor;
};

// Scenario directory plus the run document stored with it (or an override).
Loaded load_scenario_dir(const Flags& f) {
  const fs::path dir(f.scenario);
  if (!fs::is_directory(dir)) throw IoError("scenario directory not found: " + f.scenario);
  Loaded l;
  l.config = f.config.empty() ? parse_config(read_text(dir / "config.json")) : load_config(f.config);
  l.scenario = read_scenario(dir, l.config.scenario.traffic);
  l.tensor = read_attenuation(dir / "attenuation.csv", l.scenario.location_count(),
                              l.scenario.tile_count(), l.scenario.carrier_count());
  if (!f.time_of_day.empty()) {
    const auto tod = parse_time_of_day(f.time_of_day);
    if (!tod) throw InvalidConfig("--time-of-day: unknown value '" + f.time_of_day + "'");
    if (*tod != l.scenario.time_of_day())
      l.scenario = populate_ues(l.scenario, *tod, f.seed, l.config.scenario.max_ues_per_tile);
  }
  return l;
}

RunManifest base_manifest(const std::string& command, const Flags& f,
                          const std::vector<std::string>& args) {
  RunManifest m;
  m.command = command;
  m.config_path = f.config;
  m.scenario_dir = f.scenario;
  m.seed = std::to_string(f.seed);
  m.out_dir = f.out;
  m.timestamp = utc_timestamp();
  m.version = code_version();
  m.args = args;
  m.working_dir = fs::current_path().string();
  return m;
}

// ---------------------------------------------------------------------------

int cmd_generate(const Flags& f, const std::vector<std::string>& args, std::ostream& out) {
  const std::string text = f.config.empty() ? std::string("{}\n") : read_text(f.config);
  RunConfig cfg = parse_config(text);
  if (!f.time_of_day.empty()) {
    const auto tod = parse_time_of_day(f.time_of_day);
    if (!tod) throw InvalidConfig("--time-of-day: unknown value '" + f.time_of_day + "'");
    cfg.time_of_day = *tod;
  }
  const int threads = resolve_threads(f.threads);
  const Scenario base = build_scenario(cfg.scenario, f.seed);
  const Scenario scenario =
      populate_ues(base, cfg.time_of_day, f.seed, cfg.scenario.max_ues_per_tile);
  if (const auto problems = validate_scenario(scenario); !problems.empty())
    throw Error("generated scenario violates " + problems.front().invariant + " (" +
                problems.front().entity + ")");
  const auto tensor = build_attenuation_tensor(scenario, cfg.scenario.propagation, f.seed, threads);

  const fs::path dir(f.out);
  ensure_dir(dir);
  write_scenario(dir, scenario);
  write_attenuation(dir / "attenuation.csv", tensor);
  write_text(dir / "config.json", text);

  auto m = base_manifest("generate", f, args);
  m.results = {{"teams", std::to_string(scenario.team_count())},
               {"locations", std::to_string(scenario.location_count())},
               {"tiles", std::to_string(scenario.tile_count())},
               {"carriers", std::to_string(scenario.carrier_count())},
               {"time_of_day", std::string(to_string(scenario.time_of_day()))}};
  m.write(dir / "manifest.txt");
  out << "generated " << scenario.team_count() << " teams, " << scenario.location_count()
      << " locations, " << scenario.tile_count() << " tiles in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_play(const Flags& f, const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  const Loaded l = load_scenario_dir(f);
  const auto& s = l.scenario;
  if (f.carriers < 0 || f.carriers > s.carrier_count())
    throw InvalidConfig("--carriers: must lie in [0, " + std::to_string(s.carrier_count()) + "]");
  GameParams params = game_params(l.config, s, resolve_threads(f.threads));
  const GameModel model(s, l.tensor);

  const std::string policy = f.policy.empty() ? "bps" : f.policy;
  GameOutcome outcome;
  if (policy == "bps" || policy == "BPS") {
    outcome = run_multi_carrier_game(model, params, f.carriers);
  } else if (policy == "min" || policy == "MinPower" || policy == "max" || policy == "MaxPower") {
    const bool low = policy == "min" || policy == "MinPower";
    outcome.profile = low ? StrategyProfile::min_power(s) : StrategyProfile::max_power(s);
    if (f.carriers > 0) {
      const auto order = s.carriers_by_descending_frequency();
      for (std::size_t i = static_cast<std::size_t>(f.carriers); i < order.size(); ++i)
        for (int loc = 0; loc < s.location_count(); ++loc) outcome.profile.set_level(loc, order[i], 0);
    }
    outcome.prices = compute_prices(model, StrategyProfile::min_power(s), params);
    outcome.converged = true;
  } else {
    throw InvalidConfig("--policy: play accepts bps, min or max");
  }

  const fs::path dir(f.out);
  ensure_dir(dir);
  write_strategy(dir / "strategy.csv", s, outcome.profile);
  write_trace(dir / "trace.csv", outcome.trace);

  auto m = base_manifest("play", f, args);
  m.results = {{"policy", policy},
               {"converged", outcome.converged ? "true" : "false"},
               {"iterations", std::to_string(outcome.iterations)},
               {"evaluations", std::to_string(outcome.evaluations)},
               {"total_radiated_w", format_double(outcome.profile.total_radiated(s))}};
  for (const auto& c : outcome.carriers)
    m.results.emplace_back("rounds.carrier" + std::to_string(c.carrier), std::to_string(c.rounds));
  m.write(dir / "manifest.txt");
  if (!outcome.converged)
    err << "warning: best-reply dynamics did not converge within " << params.max_rounds
        << " rounds\n";
  out << "play: converged=" << (outcome.converged ? "true" : "false")
      << " iterations=" << outcome.iterations
      << " radiated_w=" << format_double(outcome.profile.total_radiated(s)) << "\n";
  return kExitOk;
}

const std::vector<std::pair<std::string, std::string>>& comparison_metrics() {
  static const std::vector<std::pair<std::string, std::string>> metrics{
      {"energy_efficiency_bpj", "Micro"}, {"energy_efficiency_bpj", "Macro"},
      {"mean_ue_throughput_bps", "All"},  {"demand_met", "All"},
      {"delivered_bits", "All"},          {"jain_all", "All"},
      {"jain_edge", "All"},               {"rb_efficiency_kb", "Micro"},
      {"rb_efficiency_kb", "Macro"},      {"radiated_w", "All"}};
  return metrics;
}

CsvTable comparison_table(const CsvTable& metrics, const std::vector<Policy>& policies) {
  std::map<std::tuple<std::string, std::string, std::string>, std::string> value;
  for (const auto& row : metrics.rows) value[{row[0], row[2], row[3]}] = row[4];
  CsvTable t{{"metric", "poa_kind", "reference", "baseline", "reference_value", "baseline_value",
              "difference"},
             {}};
  const std::string ref(to_string(Policy::BPS));
  for (Policy p : policies) {
    if (p == Policy::BPS) continue;
    const std::string base(to_string(p));
    for (const auto& [metric, kind] : comparison_metrics()) {
      const auto a = value.find({ref, metric, kind});
      const auto b = value.find({base, metric, kind});
      if (a == value.end() || b == value.end()) continue;
      const double diff = std::stod(a->second) - std::stod(b->second);
      t.rows.push_back({metric, kind, ref, base, a->second, b->second, format_double(diff)});
    }
  }
  return t;
}

int cmd_simulate(const Flags& f, const std::vector<std::string>& args, std::ostream& out,
                 bool all_policies) {
  const Loaded l = load_scenario_dir(f);
  SimulationConfig sim = simulation_config(l.config, l.scenario, resolve_threads(f.threads));
  sim.duration_s = f.duration_s;
  sim.carrier_limit = f.carriers;
  if (f.carriers < 0 || f.carriers > l.scenario.carrier_count())
    throw InvalidConfig("--carriers: must lie in [0, " +
                        std::to_string(l.scenario.carrier_count()) + "]");

  std::vector<Policy> policies;
  if (all_policies || f.policy == "all") {
    policies = {Policy::BPS, Policy::MaxPower, Policy::MinPower, Policy::EicicLite};
  } else if (f.compare) {
    policies = {Policy::BPS, Policy::EicicLite};
  } else {
    const auto p = parse_policy(f.policy.empty() ? "BPS" : f.policy);
    if (!p) throw InvalidConfig("--policy: unknown policy '" + f.policy + "'");
    policies = {*p};
  }
  sim.validate(l.scenario.carrier_count());

  std::vector<MetricsReport> reports;
  for (Policy p : policies) reports.push_back(run_simulation(l.scenario, l.tensor, p, sim, f.seed));

  const fs::path dir(f.out);
  ensure_dir(dir);
  const auto metrics = metrics_table(reports, l.scenario.traffic());
  write_csv(dir / "metrics.csv", metrics);
  const bool compared = policies.size() > 1 && policies.front() == Policy::BPS;
  if (compared) write_csv(dir / "comparison.csv", comparison_table(metrics, policies));

  auto m = base_manifest(all_policies ? "compare" : "simulate", f, args);
  for (const auto& r : reports) {
    const std::string p(to_string(r.policy));
    m.results.emplace_back(p + ".requests", std::to_string(r.requests));
    m.results.emplace_back(p + ".demand_met", format_double(r.demand_met));
    m.results.emplace_back(p + ".game_converged", r.game_converged ? "true" : "false");
  }
  m.write(dir / "manifest.txt");
  for (const auto& r : reports)
    out << to_string(r.policy) << ": requests=" << r.requests << " completed=" << r.completed
        << " failed=" << r.failed << " demand_met=" << format_double(r.demand_met)
        << " micro_ee=" << format_double(r.micro.energy_efficiency())
        << " mean_tput=" << format_double(r.mean_ue_throughput_bps) << "\n";
  return kExitOk;
}

int cmd_verify(const Flags& f, const std::vector<std::string>& args, std::ostream& out) {
  if (f.suite.empty()) throw InvalidConfig("verify: a suite name is required");
  if (std::find(suite_names().begin(), suite_names().end(), f.suite) == suite_names().end())
    throw InvalidConfig("verify: unknown suite '" + f.suite + "'");
  VerifyOptions o;
  o.seed = f.verify_seed;
  o.toys = f.toys;
  o.threads = resolve_threads(f.threads);
  const auto report = run_suite(f.suite, o);
  if (!f.out.empty()) {
    const fs::path dir(f.out);
    ensure_dir(dir);
    write_verify_report(dir / ("verify_" + f.suite + ".csv"), report);
    auto m = base_manifest("verify", f, args);
    m.seed = std::to_string(f.verify_seed);
    m.results = {{"suite", f.suite},
                 {"checks", std::to_string(report.checks())},
                 {"violations", std::to_string(report.violations())}};
    m.write(dir / "manifest.txt");
  }
  out << "verify " << f.suite << ": " << report.checks() << " checks, " << report.violations()
      << " violations\n";
  std::map<std::string, std::pair<int, int>> by_check;
  for (const auto& r : report.rows) {
    if (r.informational) continue;
    auto& [pass, fail] = by_check[r.check];
    (r.pass ? pass : fail)++;
  }
  for (const auto& [check, counts] : by_check)
    out << "  " << check << ": " << counts.first << " pass, " << counts.second << " fail\n";
  return report.violations() == 0 ? kExitOk : kExitVerification;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string code_version() { return std::string("bps ") + kVersion; }

void RunManifest::write(const fs::path& path) const {
  std::ostringstream s;
  s << "command=" << command << "\n"
    << "config=" << config_path << "\n"
    << "scenario=" << scenario_dir << "\n"
    << "seed=" << seed << "\n"
    << "out=" << out_dir << "\n"
    << "timestamp=" << timestamp << "\n"
    << "version=" << version << "\n"
    << "cwd=" << working_dir << "\n";
  for (const auto& a : args) s << "arg=" << a << "\n";
  for (const auto& [k, v] : results) s << "result." << k << "=" << v << "\n";
  write_text(path, s.str());
}

RunManifest RunManifest::read(const fs::path& path) {
  std::istringstream in(read_text(path));
  RunManifest m;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "command") m.command = value;
    else if (key == "config") m.config_path = value;
    else if (key == "scenario") m.scenario_dir = value;
    else if (key == "seed") m.seed = value;
    else if (key == "out") m.out_dir = value;
    else if (key == "timestamp") m.timestamp = value;
    else if (key == "version") m.version = value;
    else if (key == "cwd") m.working_dir = value;
    else if (key == "arg") m.args.push_back(value);
    else if (key.rfind("result.", 0) == 0) m.results.emplace_back(key.substr(7), value);
  }
  if (m.command.empty() || m.args.empty()) throw IoError(path.string() + ": not a run manifest");
  return m;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Best-reply power setting: scenarios, games, simulations and checks", "bps_cli"};
  app.require_subcommand(1);
  Flags f;

  const auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  };
  auto* gen = app.add_subcommand("generate", "Build a scenario and its attenuation tensor");
  gen->add_option("--config", f.config, "JSON run document");
  gen->add_option("--seed", f.seed, "Master seed");
  gen->add_option("--out", f.out, "Output directory")->required();
  gen->add_option("--time-of-day", f.time_of_day, "Morning, Afternoon or Evening");
  add_common(gen);

  auto* play = app.add_subcommand("play", "Run best-reply dynamics on a scenario");
  play->add_option("--scenario", f.scenario, "Directory written by generate")->required();
  play->add_option("--config", f.config, "Override the stored run document");
  play->add_option("--out", f.out, "Output directory")->required();
  play->add_option("--carriers", f.carriers, "Play only the N highest carriers (0 = all)");
  play->add_option("--policy", f.policy, "bps, min or max");
  play->add_option("--seed", f.seed, "Seed (only used with --time-of-day)");
  play->add_option("--time-of-day", f.time_of_day, "Redraw UEs for this time of day");
  add_common(play);

  CLI::App* sims[2];
  for (int i = 0; i < 2; ++i) {
    const bool cmp = i == 1;
    auto* sub = app.add_subcommand(cmp ? "compare" : "simulate",
                                   cmp ? "Simulate every policy and tabulate BPS against each"
                                       : "Simulate one policy (or --compare BPS with EicicLite)");
    sub->add_option("--scenario", f.scenario, "Directory written by generate")->required();
    sub->add_option("--config", f.config, "Override the stored run document");
    sub->add_option("--out", f.out, "Output directory")->required();
    sub->add_option("--seed", f.seed, "Traffic seed");
    sub->add_option("--duration-s", f.duration_s, "Simulated seconds");
    sub->add_option("--carriers", f.carriers, "Only the N highest carriers carry traffic");
    sub->add_option("--time-of-day", f.time_of_day, "Redraw UEs for this time of day");
    if (!cmp) {
      sub->add_option("--policy", f.policy, "BPS, MaxPower, MinPower, EicicLite or all");
      sub->add_flag("--compare", f.compare, "Run BPS and EicicLite and write comparison.csv");
    }
    add_common(sub);
    sims[i] = sub;
  }

  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  ver->add_option("suite,--suite", f.suite, "ne, substitutes, closedform or welfare");
  ver->add_option("--seed", f.verify_seed, "First toy seed");
  ver->add_option("--toys", f.toys, "Random toy instances");
  ver->add_option("--out", f.out, "Directory for the report CSV");
  add_common(ver);

  auto* rerun = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
  rerun->add_option("--manifest", f.manifest, "manifest.txt of an earlier run")->required();
  rerun->add_option("--out", f.out, "Write outputs here instead of the recorded directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(f, args, out);
    if (play->parsed()) return cmd_play(f, args, out, err);
    if (sims[0]->parsed()) return cmd_simulate(f, args, out, false);
    if (sims[1]->parsed()) return cmd_simulate(f, args, out, true);
    if (ver->parsed()) return cmd_verify(f, args, out);
    if (rerun->parsed()) {
      const auto m = RunManifest::read(f.manifest);
      const std::string out_dir = f.out.empty() ? std::string() : fs::absolute(f.out).string();
      std::vector<std::string> again;
      for (std::size_t i = 0; i < m.args.size(); ++i) {
        if (!out_dir.empty() && m.args[i] == "--out" && i + 1 < m.args.size()) {
          again.insert(again.end(), {"--out", out_dir});
          ++i;
        } else {
          again.push_back(m.args[i]);
        }
      }
      // relative paths in the recorded arguments are relative to the original cwd
      const fs::path previous = fs::current_path();
      if (!m.working_dir.empty()) fs::current_path(m.working_dir);
      const int code = run_cli(again, out, err);
      fs::current_path(previous);
      return code;
    }
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitUsage;
}

}  // namespace bps
