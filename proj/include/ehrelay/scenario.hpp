#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include "ehrelay/config.hpp"

namespace ehrelay {

using Channel = std::complex<double>;

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One node's quantities at the beginning of an interval.
struct NodeState {
  double e_in = 0.0;     // energy harvested during this interval, usable from the next
  double battery = 0.0;
  Channel channel{0.0, 0.0};
  double buffer = 0.0;   // bits; +inf for an always-backlogged transmitter
};

struct GlobalState {
  int interval = 1;  // 1-based
  std::array<NodeState, kNodes> node{};
};

/// Transmit-power set {0, delta, 2 delta, ...} truncated at b_max.
class ActionGrid {
 public:
  ActionGrid() = default;
  ActionGrid(double step, double max_value);

  std::size_t size() const noexcept { return count_; }
  double step() const noexcept { return step_; }
  double operator[](std::size_t k) const noexcept;
  double max() const noexcept { return (*this)[count_ - 1]; }

  /// Index of the grid point equal to `power` (relative tolerance 1e-9 of step).
  std::optional<std::size_t> index_of(double power) const noexcept;

 private:
  double step_ = 1.0;
  double max_value_ = 0.0;
  std::size_t count_ = 1;
};

std::array<ActionGrid, kNodes> make_grids(const ScenarioConfig& cfg);

struct IntervalOutcome {
  std::array<double, kNodes> delivered{};         // R_{1,i}, R_{2,i}
  std::array<double, kNodes> signaling_energy{};
  std::array<double, kNodes> data_energy{};
  std::array<double, kNodes> battery_overflow{};  // energy lost to a full battery
  std::array<double, kNodes> dropped_bits{};      // bits lost to a full buffer
  std::array<bool, kNodes> signaled{};
  double arrivals = 0.0;                          // R_0 admitted this interval (before drops)
  double reward = 0.0;                            // equals delivered[1]

  double spent(int l) const noexcept { return signaling_energy[l] + data_energy[l]; }
  bool relay_overflow() const noexcept { return dropped_bits[1] > 0.0; }
};

/// Bits delivered over one data phase at constant power.
double rate(double power, double abs_h, double noise, double bandwidth,
            double tau_data);
double rate(double power, const Channel& h, const ScenarioConfig& cfg, const Timing& timing);

/// Energy drawn from the battery by a signaling burst and a data burst.
double energy_needed(double power, double sig_power, const Timing& timing) noexcept;

bool energy_causality_ok(const NodeState& s, double power, double sig_power,
                         const Timing& timing) noexcept;
bool battery_overflow_ok(const NodeState& s, double power, double sig_power, double b_max,
                         const Timing& timing) noexcept;
bool data_causality_ok(const NodeState& s, double bits_out) noexcept;
bool buffer_overflow_ok(const NodeState& s, double bits_out, double bits_in,
                        double d_max) noexcept;

/// Exogenous quantities revealed at the start of the next interval.
struct NextDraws {
  std::array<double, kNodes> e_in{};
  std::array<Channel, kNodes> channel{};
};

struct JointAction {
  std::array<double, kNodes> power{};
  std::array<double, kNodes> sig_power{};  // 0 when the node does not signal
};

struct StepResult {
  GlobalState next;
  IntervalOutcome outcome;
};

/// Initial state: empty batteries and buffers (node 1 pinned to +inf when
/// backlogged), exogenous fields from the first draws.
GlobalState initial_state(const ScenarioConfig& cfg, const NextDraws& first);

/// Transition function. Throws SimulationError on off-grid powers or an
/// energy-causality violation. `arrivals` are the bits reaching node 1 during
/// this interval; they become transmittable from the next interval.
StepResult step(const GlobalState& s, const JointAction& a, const NextDraws& draws,
                double arrivals, const ScenarioConfig& cfg, const Timing& timing,
                const std::array<ActionGrid, kNodes>& grids);

}  // namespace ehrelay
