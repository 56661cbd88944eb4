#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ehrelay/agents.hpp"
#include "ehrelay/config.hpp"
#include "ehrelay/episode.hpp"
#include "ehrelay/features.hpp"
#include "ehrelay/oracle.hpp"
#include "ehrelay/signaling.hpp"

namespace ehrelay {

/// Scenario knobs in the units the experiments sweep over. `resolve()` turns
/// them into concrete per-node constants.
struct ScenarioParams {
  double tau = 1.0;
  double tau_sig_fraction = 0.01;  // tau_sig / tau
  double bandwidth = 1e6;
  double noise = 1.0;
  double e_max_db = 5.0;           // 10 log10(E_max,1 / (2 sigma^2))
  double e_max_ratio = 1.0;        // E_max,2 / E_max,1
  double battery_factor = 2.0;     // B_max,l / E_max,l
  double grid_fraction = 0.02;     // delta_l / B_max,l
  double buffer_beta = 1.0;        // D_max,2 = W tau log2(1 + beta B_max,1 / tau)
  double tx_buffer_beta = 1.0;     // same rule for D_max,1 when arrivals are finite
  ArrivalConfig arrivals;
  std::optional<std::array<double, kNodes>> e_max, b_max, d_max, delta;  // explicit overrides

  ScenarioConfig resolve() const;
};

struct ExperimentConfig {
  int episodes = 200;
  int intervals = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  int bootstrap_resamples = 10000;
  std::string sweep = "tau_sig";
  std::vector<double> values;  // empty: the sweep's default list
  std::vector<Arm> arms;  // empty: the sweep's default arms
};

struct RunConfig {
  ScenarioParams scenario;
  SignalingConfig signaling;
  BasisConfig features;
  LearningConfig learning;
  OracleOptions oracle;
  ExperimentConfig experiment;
};

/// Parses the JSON config format. Unknown keys and bad values raise
/// ConfigError naming the dotted field.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

/// Settings for one arm at one resolved scenario.
ArmSettings arm_settings(const RunConfig& cfg, Arm arm);

/// Validates everything the run needs; throws ConfigError.
void validate(const RunConfig& cfg);

}  // namespace ehrelay

namespace ehrelay {

/// Realization file: {"e_in": [[E1, E2], ...], "channel": [[[re, im], [re, im]], ...],
/// "arrivals": [...]}, one entry per interval including the look-ahead one.
std::string realization_to_json(const Realization& r);
Realization realization_from_json(const std::string& text);

}  // namespace ehrelay
