#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bps/analysis.hpp"

namespace bps {

struct VerifyOptions {
  std::uint64_t seed = 1000;  // toy i uses seed + i
  int toys = 200;
  int fixed_strategy_toys = 50;
  int draws = 1000;        // closed-form parameter draws
  int sweeps = 1000;       // scalar interference sweeps per price regime
  int substitutes_samples = 40;  // team-level samples per toy
  int substitutes_toys = 20;
  int threads = 1;
  ToyRanges ranges;
};

struct CheckRow {
  std::string suite;
  std::string check;
  std::string instance;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  bool informational = false;  // reported, never counted as a violation
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckRow> rows;

  int violations() const;
  int checks() const;  // non-informational rows
  /// Non-informational rows for one check name.
  int count(const std::string& check, bool passed) const;
};

/// Suite names accepted by run_suite.
const std::vector<std::string>& suite_names();

/// Converged BPS outcomes on random toys: per-carrier unilateral-deviation
/// certificate, rounds to convergence and evaluation counts.
VerifyReport verify_ne(const VerifyOptions& options);
/// BPS welfare vs the best equilibrium welfare on toys with several pure
/// equilibria, and the min-power vs max-power ordering on two-tier toys.
VerifyReport verify_welfare(const VerifyOptions& options);
/// Closed-form reply vs grid oracle, derivative vs finite differences and the
/// price-bound equivalence.
VerifyReport verify_closedform(const VerifyOptions& options);
/// Monotonicity of the discrete scalar reply along interference sweeps, plus
/// the team-level Frobenius check on toys (informational).
VerifyReport verify_substitutes(const VerifyOptions& options);

/// Throws InvalidConfig for an unknown suite.
VerifyReport run_suite(const std::string& suite, const VerifyOptions& options);

void write_verify_report(const std::filesystem::path& path, const VerifyReport& report);

}  // namespace bps
