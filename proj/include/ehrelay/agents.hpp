#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ehrelay/features.hpp"
#include "ehrelay/realization.hpp"
#include "ehrelay/scenario.hpp"

namespace ehrelay {

enum class ScheduleIndexing {
  kPerEpisode,  // alpha_i = eps_i = 1/i with i the interval inside the episode
  kGlobal,      // i counts intervals across all episodes of the arm
};

struct LearningConfig {
  double gamma = 0.9;
  ScheduleIndexing indexing = ScheduleIndexing::kPerEpisode;
  bool persist_weights = true;  // carry weights and channel means across episodes
};

/// Learning-rate / exploration schedule 1/i.
inline double harmonic(long i) noexcept { return 1.0 / static_cast<double>(i < 1 ? 1 : i); }

/// Gated linear SARSA step on `w`:
///   t = reward + gamma f_next.w - f_now.w;  w += alpha t f_now  iff alpha t > 0.
/// Returns the applied scale alpha*t, or 0 when the gate kept w unchanged.
double update_weights(std::span<double> w, const SparseFeatures& f_now, double reward,
                      const SparseFeatures& f_next, double alpha, double gamma);

struct AgentMemory {
  std::vector<double> weights;
  std::array<ChannelEstimate, kNodes> channel{};  // own: exact, peer: believed
  long global_step = 0;
  long updates = 0;
  long applied_updates = 0;
};

/// One node's learner: linear action-value function over a feature basis
/// with epsilon-greedy selection restricted to affordable powers.
class SarsaAgent {
 public:
  SarsaAgent(std::shared_ptr<const FeatureBasis> basis, const LearningConfig& cfg, Rng rng);

  double q_hat(const FeatureContext& ctx, std::size_t action) const;

  /// Feasible powers are the prefix [0, n_feasible); n_feasible >= 1.
  std::size_t select_action(const FeatureContext& ctx, std::size_t n_feasible, double epsilon);

  bool update(const SparseFeatures& f_now, double reward, const SparseFeatures& f_next,
              double alpha);

  void features(const FeatureContext& ctx, std::size_t action, SparseFeatures& out) const {
    basis_->features(ctx, action, out);
  }

  AgentMemory& memory() noexcept { return memory_; }
  const AgentMemory& memory() const noexcept { return memory_; }
  const FeatureBasis& basis() const noexcept { return *basis_; }
  const LearningConfig& learning() const noexcept { return cfg_; }
  void reset_memory();

 private:
  std::shared_ptr<const FeatureBasis> basis_;
  LearningConfig cfg_;
  Rng rng_;
  AgentMemory memory_;
  std::vector<double> scratch_;
};

/// Myopic baseline. Node 1 spends its whole budget; node 2 picks the largest
/// affordable power whose rate fits in its buffer.
std::size_t hasty_action(int node, const NodeState& own, const ActionGrid& grid,
                         const ScenarioConfig& cfg, const Timing& timing);

}  // namespace ehrelay
