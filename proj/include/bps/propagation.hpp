#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bps/common.hpp"

namespace bps {

enum class PoaKind { Macro, Micro };

// Log-distance path loss for one PoA kind:
//   PL(d, f) = intercept + 10 * exponent * log10(d) + freq_coeff * log10(f / f_ref)
struct PathLossParams {
  double intercept_db = 0.0;
  double exponent = 2.0;
  double shadow_sigma_db = 0.0;
};

struct PropagationModel {
  PathLossParams macro{13.5, 3.5, 6.0};
  PathLossParams micro{30.5, 3.67, 4.0};
  double reference_frequency_hz = 1e9;
  double min_distance_m = 10.0;
  double frequency_coefficient_db = 20.0;
  // Extra i.i.d. dB draw on vehicular UEs, redrawn every power-update period.
  bool vehicular_fast_fading = false;
  double fast_fading_sigma_db = 4.0;

  const PathLossParams& params(PoaKind kind) const {
    return kind == PoaKind::Macro ? macro : micro;
  }
  // Throws InvalidConfig when exponent < 2 or sigma < 0.
  void validate() const;
};

double path_loss_db(const PropagationModel& model, PoaKind kind, double distance_m,
                    double frequency_hz);

/// Linear gain in [0, 1]. Distances below the model's minimum are clamped up to
/// it; non-positive distances throw InvalidDistance.
double path_gain(const PropagationModel& model, PoaKind kind, double distance_m,
                 double frequency_hz, double shadow_db);

class Scenario;

/// Dense (location, tile, carrier) array of linear gains, row-major in that order.
class AttenuationTensor {
 public:
  AttenuationTensor() = default;
  AttenuationTensor(int locations, int tiles, int carriers, double fill = 0.0);

  int locations() const { return locations_; }
  int tiles() const { return tiles_; }
  int carriers() const { return carriers_; }
  std::size_t size() const { return data_.size(); }

  double at(int l, int z, int c) const { return data_[index(l, z, c)]; }
  double& at(int l, int z, int c) { return data_[index(l, z, c)]; }
  std::span<const double> values() const { return data_; }

  bool operator==(const AttenuationTensor&) const = default;

 private:
  std::size_t index(int l, int z, int c) const {
    return (static_cast<std::size_t>(l) * static_cast<std::size_t>(tiles_) +
            static_cast<std::size_t>(z)) *
               static_cast<std::size_t>(carriers_) +
           static_cast<std::size_t>(c);
  }

  int locations_ = 0;
  int tiles_ = 0;
  int carriers_ = 0;
  std::vector<double> data_;
};

/// Gains from every location to every tile centre on every carrier. One
/// shadowing draw per (location, tile), shared by all carriers.
AttenuationTensor build_attenuation_tensor(const Scenario& scenario,
                                           const PropagationModel& model,
                                           std::uint64_t seed, int threads = 1);

/// UE-weighted mean gain of `location` on `carrier` over `served_tiles`.
/// Falls back to the plain mean when none of the tiles holds a UE.
double average_attenuation(const AttenuationTensor& tensor, const Scenario& scenario,
                           int location, int carrier, std::span<const int> served_tiles);

}  // namespace bps
