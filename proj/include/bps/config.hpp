#pragma once

#include <optional>
#include <string>

#include "bps/game.hpp"
#include "bps/scenario.hpp"
#include "bps/simulate.hpp"

namespace bps {

/// Everything a run document can set. Unset game/simulation fields keep the
/// library defaults.
struct RunConfig {
  ScenarioConfig scenario;
  TimeOfDay time_of_day = TimeOfDay::Morning;

  struct Game {
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 0.6;
    double k = 0.25;
    double gamma_min_db = -10.0;
    double noise_figure_db = 9.0;
    double tie_tolerance = 1e-9;
    int max_rounds = 50;
    bool update_prices_each_iteration = false;
  } game;

  SimulationConfig simulation;  // game/propagation members are filled at use
};

/// Parses a JSON run document. Unknown keys and wrong types throw
/// InvalidConfig naming the offending key path.
RunConfig parse_config(const std::string& json_text);
/// Reads and parses `path`; IoError when unreadable.
RunConfig load_config(const std::string& path);

/// Game parameters for `scenario` (noise from its carrier bandwidths).
GameParams game_params(const RunConfig& config, const Scenario& scenario, int threads = 1);
/// Simulation parameters with game and propagation sections filled in.
SimulationConfig simulation_config(const RunConfig& config, const Scenario& scenario,
                                   int threads = 1);

}  // namespace bps
