#pragma once

// Brute-force reference: dense density matrices over a small mode set, with
// every optical element written out as an explicit matrix and every loss as
// a Kraus map. Shares nothing with the sparse engine beyond the config.

#include <cstdint>
#include <vector>

#include "dfsim/detection.hpp"
#include "dfsim/protocol.hpp"

namespace dfsim {

inline constexpr int kOracleMaxCutoff = 3;
inline constexpr int kOracleMaxModes = 10;

struct OracleOutcome {
  SettingTable coincidences{};
  double success_probability = 0.0;
};

/// Throws ConfigError when the config needs more than kOracleMaxCutoff
/// photons or kOracleMaxModes modes.
OracleOutcome oracle_fixed_phase(const ExperimentConfig& cfg, double phi_h, double phi_v);

struct OracleReport {
  double max_deviation = 0.0;
  std::size_t compared = 0;  // probabilities compared
  bool passed = false;
};

/// Compares the engine and the oracle on all 37 outcome probabilities at
/// every phase of the config.
OracleReport oracle_check(const ExperimentConfig& cfg, double tolerance = 1e-9);

/// A small random configuration drawn from `seed`, spanning all variants.
ExperimentConfig random_oracle_config(std::uint64_t seed);

}  // namespace dfsim
