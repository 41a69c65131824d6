#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bps/analysis.hpp"
#include "bps/game.hpp"
#include "bps/scenario.hpp"
#include "bps/simulate.hpp"

namespace bps {

namespace fs = std::filesystem;

/// Shortest text that parses back to the same double.
std::string format_double(double value);

/// Minimal comma-separated table: one header row, no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; IoError when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const fs::path& path);
void write_csv(const fs::path& path, const CsvTable& table);

/// tiles.csv, locations.csv, carriers.csv, levels.csv and network.csv.
void write_scenario(const fs::path& dir, const Scenario& scenario);
/// Inverse of write_scenario. The traffic profile is not part of the export.
Scenario read_scenario(const fs::path& dir, const TrafficProfile& traffic = {});

void write_attenuation(const fs::path& path, const AttenuationTensor& tensor);
AttenuationTensor read_attenuation(const fs::path& path, int locations, int tiles, int carriers);

void write_strategy(const fs::path& path, const Scenario& scenario, const StrategyProfile& profile);
StrategyProfile read_strategy(const fs::path& path, const Scenario& scenario);

void write_trace(const fs::path& path, std::span<const TraceRow> trace);

/// One row per (policy, time_of_day, metric, poa_kind, value).
CsvTable metrics_table(std::span<const MetricsReport> reports, const TrafficProfile& traffic);

/// FNV-1a over the level indices, as 16 hex digits.
std::string profile_hash(const StrategyProfile& profile);

/// ne_index, welfare, is_bps_outcome, profile_hash; plus <stem>_<i>_strategy.csv
/// next to it for every equilibrium.
void write_ne_report(const fs::path& path, const Scenario& scenario, const NEReport& report);

}  // namespace bps
