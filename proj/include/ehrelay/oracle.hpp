#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ehrelay/realization.hpp"
#include "ehrelay/scenario.hpp"

namespace ehrelay {

/// The instance is beyond what the exact search is allowed to attempt.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  int max_intervals = 10;
  std::size_t max_joint_actions = 441;  // |A_1| * |A_2|
  std::size_t max_frontier = 200000;     // non-dominated states kept per interval
  /// Data-phase lengths to optimize over; empty selects {tau, tau - tau_sig}.
  std::vector<Timing> timings;
};

struct OracleResult {
  double throughput = 0.0;
  std::vector<std::array<std::size_t, kNodes>> actions;  // grid indices per interval
  std::vector<std::array<double, kNodes>> powers;
  Timing timing;
  std::size_t peak_frontier = 0;
};

/// Non-causal grid optimum for one realization: exact forward search over
/// joint power sequences, keeping per interval only the states not dominated
/// in (throughput so far, B_1, B_2, D_1, D_2). No signaling energy is spent.
/// Throws OracleRefusal when the instance exceeds the configured limits.
OracleResult offline_oracle(const Realization& real, const ScenarioConfig& cfg,
                            const std::array<ActionGrid, kNodes>& grids,
                            const OracleOptions& opts = {});

}  // namespace ehrelay
