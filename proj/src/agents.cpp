#include "ehrelay/agents.hpp"

#include <algorithm>
#include <cmath>

namespace ehrelay {

double update_weights(std::span<double> w, const SparseFeatures& f_now, double reward,
                      const SparseFeatures& f_next, double alpha, double gamma) {
  const double td = reward + gamma * f_next.dot(w) - f_now.dot(w);
  const double scale = alpha * td;
  if (!(scale > 0.0)) return 0.0;
  for (std::size_t i = 0; i < f_now.nnz(); ++i) w[f_now.index[i]] += scale * f_now.value[i];
  return scale;
}

SarsaAgent::SarsaAgent(std::shared_ptr<const FeatureBasis> basis, const LearningConfig& cfg,
                       Rng rng)
    : basis_(std::move(basis)), cfg_(cfg), rng_(std::move(rng)) {
  reset_memory();
}

void SarsaAgent::reset_memory() {
  memory_ = AgentMemory{};
  memory_.weights.assign(basis_->size(), 0.0);
}

double SarsaAgent::q_hat(const FeatureContext& ctx, std::size_t action) const {
  SparseFeatures f;
  basis_->features(ctx, action, f);
  return f.dot(memory_.weights);
}

std::size_t SarsaAgent::select_action(const FeatureContext& ctx, std::size_t n_feasible,
                                      double epsilon) {
  if (n_feasible <= 1) return 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng_) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, n_feasible - 1);
    return pick(rng_);
  }
  scratch_.resize(n_feasible);
  basis_->action_values(ctx, memory_.weights, scratch_);
  const double best = *std::max_element(scratch_.begin(), scratch_.end());
  std::size_t ties = 0;
  for (double q : scratch_) ties += (q == best);
  std::uniform_int_distribution<std::size_t> pick(0, ties - 1);
  std::size_t nth = ties > 1 ? pick(rng_) : 0;
  for (std::size_t k = 0; k < n_feasible; ++k) {
    if (scratch_[k] == best) {
      if (nth == 0) return k;
      --nth;
    }
  }
  return 0;
}

bool SarsaAgent::update(const SparseFeatures& f_now, double reward, const SparseFeatures& f_next,
                        double alpha) {
  ++memory_.updates;
  const double applied =
      update_weights(memory_.weights, f_now, reward, f_next, alpha, cfg_.gamma);
  if (applied > 0.0) ++memory_.applied_updates;
  return applied > 0.0;
}

std::size_t hasty_action(int node, const NodeState& own, const ActionGrid& grid,
                         const ScenarioConfig& cfg, const Timing& timing) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!energy_causality_ok(own, grid[k], 0.0, timing)) break;
    if (node == 1 && rate(grid[k], own.channel, cfg, timing) > own.buffer) break;
    best = k;
  }
  return best;
}

}  // namespace ehrelay
