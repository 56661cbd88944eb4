#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ehrelay/agents.hpp"
#include "ehrelay/features.hpp"
#include "ehrelay/oracle.hpp"
#include "ehrelay/realization.hpp"
#include "ehrelay/signaling.hpp"
#include "ehrelay/trace.hpp"

namespace ehrelay {

enum class Arm { kMarl, kMarlFsr, kMarlRbf, kNoCoop, kHasty, kOracle };

Arm parse_arm(const std::string& name);
std::string arm_name(Arm arm);
const std::vector<Arm>& all_arms();
/// Arms that spend part of every interval on signaling.
bool arm_signals(Arm arm) noexcept;
bool arm_learns(Arm arm) noexcept;

struct EpisodeMetrics {
  int intervals = 0;
  double throughput = 0.0;          // bits delivered by the relay
  double relay_overflows = 0.0;     // intervals with bits dropped at the relay
  double relay_dropped_bits = 0.0;
  double tx_dropped_bits = 0.0;
  double battery_overflow = 0.0;    // energy lost to full batteries, both nodes
  double signaling_energy = 0.0;
  double arrived_bits = 0.0;        // Poisson arrivals at node 1

  double normalized_throughput() const noexcept {
    return intervals > 0 ? throughput / intervals : 0.0;
  }
  /// Delivered over arrived bits; 1 when nothing arrived.
  double delivered_ratio() const noexcept {
    return arrived_bits > 0.0 ? throughput / arrived_bits : 1.0;
  }
};

using TraceSink = std::function<void(const TraceRow&)>;

struct ArmSettings {
  Arm arm = Arm::kMarl;
  ScenarioConfig scenario;
  SignalingConfig signaling;
  BasisConfig basis;  // fsr/rbf parameters; the kind follows the arm
  LearningConfig learning;
  OracleOptions oracle;
  std::uint64_t seed = 1;
};

/// Runs the episodes of one policy arm in order. Learning arms keep their
/// agents between calls; the other arms are stateless.
class ArmRunner {
 public:
  explicit ArmRunner(const ArmSettings& settings);

  EpisodeMetrics run_episode(const Realization& real, int episode, const TraceSink& sink = {});

  const SarsaAgent* agent(int l) const noexcept { return agents_[l].get(); }
  const ArmSettings& settings() const noexcept { return settings_; }
  const std::array<ActionGrid, kNodes>& grids() const noexcept { return grids_; }

 private:
  EpisodeMetrics run_learning(const Realization& real, int episode, const TraceSink& sink);
  EpisodeMetrics run_hasty(const Realization& real, int episode, const TraceSink& sink);
  EpisodeMetrics run_oracle(const Realization& real, int episode, const TraceSink& sink);

  ArmSettings settings_;
  std::array<ActionGrid, kNodes> grids_;
  std::array<QuantizerSpec, kNodes> specs_;
  std::array<std::unique_ptr<SarsaAgent>, kNodes> agents_;
};

/// Replays fixed per-interval powers without signaling and records metrics.
EpisodeMetrics replay_schedule(const Realization& real, const ScenarioConfig& cfg,
                               const Timing& timing, const std::array<ActionGrid, kNodes>& grids,
                               const std::vector<std::array<double, kNodes>>& powers,
                               int episode = 0, const TraceSink& sink = {});

}  // namespace ehrelay
