#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bps/game.hpp"

namespace bps {

/// One location, one tile, one carrier.
struct ContinuousGameParams {
  double alpha = 1.0;
  double beta = 1.0;
  double a = 1.0;      // gain
  double noise = 0.1;  // watts
  double xi = 1.0;     // price per received watt
  double s_max = 1.0;  // watts
};

/// w(s) = sigmoid(alpha * (a*s/(I+N) - beta)) - xi*a*s
double scalar_payoff(double s, double interference, const ContinuousGameParams& p);

/// Largest price for which the payoff has a real, positive stationary point.
inline double price_bound(double interference, const ContinuousGameParams& p) {
  return p.alpha / (4.0 * (interference + p.noise));
}

/// Local maximiser of w from the closed form, or nullopt when the price bound
/// is violated (no real root). Not clamped.
std::optional<double> stationary_best_reply(double interference, const ContinuousGameParams& p);

struct ClosedFormReply {
  double s = 0.0;
  bool degenerate = false;  // price bound violated; s = 0
  bool clamped = false;     // stationary point outside [0, s_max]
};

/// Maximiser of w on [0, s_max]: the stationary point clamped to the domain,
/// or 0 when w(0) is at least as large.
ClosedFormReply closed_form_best_reply(double interference, const ContinuousGameParams& p);

/// d s_br / d I. Throws DomainError when the price bound is violated; returns
/// -infinity exactly at the bound.
double best_reply_derivative(double interference, const ContinuousGameParams& p);

/// The three additive terms of the derivative (for scale-aware comparisons).
struct DerivativeTerms {
  double beta_term = 0.0;
  double root_term = 0.0;
  double log_term = 0.0;
};
DerivativeTerms best_reply_derivative_terms(double interference, const ContinuousGameParams& p);

struct BestReplyPayoff {
  double utility = 0.0;
  double payoff = 0.0;
};
/// Utility and payoff evaluated at the stationary best reply. Throws DomainError.
BestReplyPayoff payoff_along_best_reply(double interference, const ContinuousGameParams& p);

/// Grid oracle: argmax of w over `points` uniform samples of [0, s_max]
/// (lowest s among exact ties).
double grid_best_reply(double interference, const ContinuousGameParams& p, int points = 100000);

/// Discrete best reply over power levels `fractions` x s_max; ties go to the
/// lower power.
double discrete_best_reply(double interference, const ContinuousGameParams& p,
                           std::span<const double> fractions, double tie_tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Toy instances

struct ToyRanges {
  int min_teams = 2, max_teams = 3;
  int min_locations = 1, max_locations = 2;  // per team, macro included
  int min_levels = 2, max_levels = 4;
  int min_carriers = 1, max_carriers = 2;
  double tile_side_m = 50.0;
  bool random_prices = true;  // draw k and delta
};

/// Owning bundle of a small scenario, its tensor and game parameters.
struct Toy {
  std::uint64_t seed = 0;
  Scenario scenario;
  AttenuationTensor tensor;
  GameParams params;
  std::string describe() const;
};

Toy random_toy(std::uint64_t seed, const ToyRanges& ranges = {});

/// Two mirror-image teams with zero shadowing and mirrored UE counts.
Toy symmetric_pair_toy(int locations_per_team, int levels, int carriers);

/// Evenly spaced level set {0, 1/(n-1), ..., 1}.
std::vector<double> even_levels(int n);

// ---------------------------------------------------------------------------
// Exhaustive enumeration

struct NashEquilibrium {
  StrategyProfile profile;
  std::vector<double> payoffs;  // per team with UEs, by team id
  double welfare = 0.0;
};

struct NEReport {
  std::vector<NashEquilibrium> equilibria;
  std::uint64_t joint_profiles = 0;
  int max_welfare_index = -1;
  int bps_index = -1;  // position of the supplied BPS outcome, if it is an NE
  double bps_welfare = 0.0;
  bool bps_supplied = false;
};

/// Number of joint profiles (each team over its full member x carrier matrix).
std::uint64_t joint_profile_count(const Scenario& scenario, std::span<const int> scope = {});

/// Every pure NE of the game over `scope` carriers: no team can raise its
/// payoff beyond the tie tolerance with any change of its whole level matrix.
/// Throws TooLarge above `limit` joint profiles.
NEReport enumerate_pure_ne(const GameModel& model, const GameParams& params,
                           const PriceTable& prices, std::span<const int> scope = {},
                           const StrategyProfile* bps_outcome = nullptr,
                           std::uint64_t limit = 10'000'000);

/// Social welfare: sum of payoffs of the teams that have UEs.
double social_welfare(const GameModel& model, const StrategyProfile& profile,
                      const GameParams& params, const PriceTable& prices,
                      std::span<const int> scope = {});

/// Mean team payoff over teams with UEs.
double network_mean_payoff(const GameModel& model, const StrategyProfile& profile,
                           const GameParams& params, const PriceTable& prices);

/// Best gain any team obtains by changing its whole level matrix (all scope
/// carriers jointly). Zero or below means the profile is an NE.
DeviationReport joint_deviation_check(const GameModel& model, const StrategyProfile& profile,
                                      const GameParams& params, const PriceTable& prices,
                                      std::span<const int> scope = {},
                                      std::uint64_t limit = 10'000'000);

// ---------------------------------------------------------------------------
// Strategic substitutes

struct SubstitutesViolation {
  int sample = 0;
  int team = 0;
  double norm_low = 0.0;   // ||theta(I)||_F
  double norm_high = 0.0;  // ||theta(I_hat)||_F
  double interference_norm_low = 0.0;
  double interference_norm_high = 0.0;
};

struct SubstitutesReport {
  int samples = 0;
  int compared = 0;
  int skipped_incomparable = 0;
  std::vector<SubstitutesViolation> violations;
};

/// Samples opponent profile pairs whose induced interference matrices are
/// element-wise ordered and checks that the Frobenius norm of the team's
/// best-reply power matrix does not grow with interference. Best replies are
/// per carrier, each carrier treated as the first one played.
SubstitutesReport check_strategic_substitutes(const GameModel& model, const GameParams& params,
                                              const PriceTable& prices, int sample_count,
                                              std::uint64_t seed);

struct SweepResult {
  std::vector<double> interference;
  std::vector<double> reply;  // watts
  int increases = 0;          // steps where the reply went up
  int decreases = 0;
};

/// Discrete scalar best reply along an increasing interference sweep.
SweepResult scalar_sweep(const ContinuousGameParams& p, std::span<const double> fractions,
                         std::span<const double> interference);

}  // namespace bps
