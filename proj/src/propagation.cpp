#include "bps/propagation.hpp"

#include <cmath>

#include "bps/scenario.hpp"

namespace bps {

namespace {
constexpr std::uint64_t kStreamShadowing = 3;
}

void PropagationModel::validate() const {
  for (auto kind : {PoaKind::Macro, PoaKind::Micro}) {
    const auto& p = params(kind);
    const std::string key = kind == PoaKind::Macro ? "propagation.macro" : "propagation.micro";
    if (!(p.exponent >= 2.0)) throw InvalidConfig(key + ".exponent: must be >= 2");
    if (!(p.shadow_sigma_db >= 0.0))
      throw InvalidConfig(key + ".shadow_sigma_db: must be >= 0");
    if (!std::isfinite(p.intercept_db)) throw InvalidConfig(key + ".intercept_db: not finite");
  }
  if (!(reference_frequency_hz > 0.0))
    throw InvalidConfig("propagation.reference_frequency_hz: must be > 0");
  if (!(min_distance_m > 0.0)) throw InvalidConfig("propagation.min_distance_m: must be > 0");
  if (!(fast_fading_sigma_db >= 0.0))
    throw InvalidConfig("propagation.fast_fading_sigma_db: must be >= 0");
}

double path_loss_db(const PropagationModel& model, PoaKind kind, double distance_m,
                    double frequency_hz) {
  if (!(distance_m > 0.0)) throw InvalidDistance("distance must be > 0");
  if (!(frequency_hz > 0.0)) throw InvalidDistance("frequency must be > 0");
  const auto& p = model.params(kind);
  const double d = std::max(distance_m, model.min_distance_m);
  return p.intercept_db + 10.0 * p.exponent * std::log10(d) +
         model.frequency_coefficient_db * std::log10(frequency_hz / model.reference_frequency_hz);
}

double path_gain(const PropagationModel& model, PoaKind kind, double distance_m,
                 double frequency_hz, double shadow_db) {
  const double loss = path_loss_db(model, kind, distance_m, frequency_hz);
  return std::min(1.0, db_to_linear(shadow_db - loss));
}

AttenuationTensor::AttenuationTensor(int locations, int tiles, int carriers, double fill)
    : locations_(locations), tiles_(tiles), carriers_(carriers) {
  if (locations < 0 || tiles < 0 || carriers < 0)
    throw IndexError("tensor dimensions must be nonnegative");
  data_.assign(static_cast<std::size_t>(locations) * tiles * carriers, fill);
}

AttenuationTensor build_attenuation_tensor(const Scenario& scenario,
                                           const PropagationModel& model, std::uint64_t seed,
                                           int threads) {
  model.validate();
  const int L = scenario.location_count();
  const int Z = scenario.tile_count();
  const int C = scenario.carrier_count();
  AttenuationTensor tensor(L, Z, C);
  // Each (l, z) pair owns its RNG sub-stream, so threading cannot change the draws.
  parallel_for(static_cast<std::size_t>(L), threads, [&](std::size_t li) {
    const int l = static_cast<int>(li);
    const Location& loc = scenario.location(l);
    const double sigma = model.params(loc.kind).shadow_sigma_db;
    for (int z = 0; z < Z; ++z) {
      double shadow = 0.0;
      if (sigma > 0.0) {
        Rng rng = make_rng(seed, kStreamShadowing, li, static_cast<std::uint64_t>(z));
        shadow = std::normal_distribution<double>(0.0, sigma)(rng);
      }
      const double d =
          std::max(distance(loc.position, scenario.tile(z).center), model.min_distance_m);
      for (int c = 0; c < C; ++c)
        tensor.at(l, z, c) =
            path_gain(model, loc.kind, d, scenario.carrier(c).center_frequency_hz, shadow);
    }
  });
  return tensor;
}

double average_attenuation(const AttenuationTensor& tensor, const Scenario& scenario,
                           int location, int carrier, std::span<const int> served_tiles) {
  if (served_tiles.empty())
    throw EmptyTileSet("location " + std::to_string(location) + " serves no tiles");
  double weighted = 0.0;
  double plain = 0.0;
  double users = 0.0;
  for (int z : served_tiles) {
    const double g = tensor.at(location, z, carrier);
    const double e = scenario.tile(z).ue_count();
    weighted += e * g;
    users += e;
    plain += g;
  }
  return users > 0.0 ? weighted / users : plain / static_cast<double>(served_tiles.size());
}

}  // namespace bps
