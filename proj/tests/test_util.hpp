#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "bps/game.hpp"
#include "bps/scenario.hpp"

namespace bps::test {

/// One single-location team per entry of `team_x`; tile z is served by
/// `serving[z]` and holds `ues[z]` pedestrian UEs. Gains are filled by hand.
struct HandToy {
  Scenario scenario;
  AttenuationTensor tensor;
  GameParams params;
};

inline HandToy hand_toy(std::vector<double> max_w, const std::vector<int>& ues,
                        const std::vector<int>& serving, std::vector<double> levels,
                        int carriers = 1, double gain = 0.0,
                        TrafficProfile traffic = {}) {
  const int L = static_cast<int>(max_w.size());
  const int Z = static_cast<int>(ues.size());
  TileGrid grid{{0.0, 0.0}, 10.0, std::max(Z, L), 1};
  std::vector<Location> locs;
  std::vector<Team> teams;
  for (int l = 0; l < L; ++l) {
    locs.push_back({l, PoaKind::Macro, {10.0 * l + 5.0, 5.0}, max_w[l], l});
    teams.push_back({l, l, {l}, {}, 0});
  }
  std::vector<Tile> tiles;
  for (int z = 0; z < Z; ++z) {
    Tile t;
    t.id = z;
    t.col = z;
    t.center = {10.0 * z + 5.0, 5.0};
    t.side_m = 10.0;
    t.serving_location = serving[z];
    t.ue_pedestrian = ues[z];
    tiles.push_back(t);
  }
  std::vector<Carrier> cs;
  for (int c = 0; c < carriers; ++c) cs.push_back({c, 2.6e9 - 0.9e9 * c, 10e6});
  HandToy toy{Scenario(cs, locs, tiles, teams, PowerLevelSet(std::move(levels)), grid,
                       std::move(traffic), TimeOfDay::Morning),
              AttenuationTensor(L, Z, carriers, gain), {}};
  toy.params.noise_w = {0.1};
  toy.params.delta = 0.0;
  return toy;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const char* root = std::getenv("BPS_TEST_TMP");
  auto dir = std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string()) /
             name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace bps::test
