#include "ehrelay/tabular.hpp"

#include <algorithm>
#include <limits>

namespace ehrelay {

FiniteGame random_game(int max_states, int max_actions, Rng& rng) {
  std::uniform_int_distribution<int> ns(1, max_states);
  std::uniform_int_distribution<int> na(1, max_actions);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  FiniteGame g;
  g.n_states = ns(rng);
  g.n_actions = {na(rng), na(rng)};
  const std::size_t cells = static_cast<std::size_t>(g.n_states) * g.joint_count();
  std::uniform_int_distribution<int> pick(0, g.n_states - 1);
  g.next_state.resize(cells);
  g.reward.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    g.next_state[c] = pick(rng);
    // a quarter of the cells pay nothing, so zero rewards are exercised too
    g.reward[c] = ur(rng) < 0.25 ? 0.0 : ur(rng);
  }
  return g;
}

TabularQ::TabularQ(const FiniteGame& g) : game(&g) {
  central.assign(static_cast<std::size_t>(g.n_states) * g.joint_count(), 0.0);
  for (int l = 0; l < 2; ++l)
    local[l].assign(static_cast<std::size_t>(g.n_states) * g.n_actions[l], 0.0);
}

double TabularQ::projection(int l, int s, int a) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < game->joint_count(); ++j)
    if (game->local(l, j) == a) best = std::max(best, Q(s, j));
  return best;
}

void centralized_sarsa_update(TabularQ& t, int s, int joint, double reward, int s_next,
                              int joint_next, double alpha, double gamma) {
  const double target = reward + gamma * t.Q(s_next, joint_next);
  t.Q(s, joint) = t.Q(s, joint) * (1.0 - alpha) + alpha * target;
}

void distributed_q_update(TabularQ& t, int l, int s, int a, double reward, int s_next,
                          int a_next, double alpha, double gamma) {
  double& q = t.q(l, s, a);
  const double candidate = (1.0 - alpha) * q + alpha * (reward + gamma * t.q(l, s_next, a_next));
  q = std::max(q, candidate);
}

std::vector<int> random_policy(const FiniteGame& g, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, g.joint_count() - 1);
  std::vector<int> pi(g.n_states);
  for (int& p : pi) p = pick(rng);
  return pi;
}

std::vector<TrajectoryStep> rollout(const FiniteGame& g, const std::vector<int>& policy,
                                    int start, int steps, double explore, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, g.joint_count() - 1);
  std::vector<TrajectoryStep> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  int s = start;
  for (int i = 0; i <= steps; ++i) {
    int j = policy.at(s);
    if (explore > 0.0 && u(rng) < explore) j = pick(rng);
    out.push_back({s, j});
    s = g.transition(s, j);
  }
  return out;
}

}  // namespace ehrelay
