#pragma once

#include <cmath>

#include "ehrelay/config_io.hpp"
#include "ehrelay/scenario.hpp"

namespace testutil {

// Scenario with the default profile's physical constants.
inline ehrelay::ScenarioConfig defaults() { return ehrelay::ScenarioParams{}.resolve(); }

// Small hand-checkable scenario: W = 1, sigma^2 = 1, unit grid.
inline ehrelay::ScenarioConfig unit_scenario(double tau_sig = 0.0) {
  ehrelay::ScenarioConfig c;
  c.tau = 1.0;
  c.tau_sig = tau_sig;
  c.bandwidth = 1.0;
  c.noise = 1.0;
  c.e_max = {10.0, 10.0};
  c.b_max = {10.0, 10.0};
  c.d_max = {ehrelay::kUnbounded, 20.0};
  c.delta = {1.0, 1.0};
  return c;
}

inline ehrelay::Channel unit_channel(double abs_h = 1.0) { return {abs_h, 0.0}; }

}  // namespace testutil
