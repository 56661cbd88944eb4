#pragma once

#include <cstddef>
#include <vector>

#include "ehrelay/realization.hpp"

namespace ehrelay {

/// Finite two-player Markov game with a shared nonnegative reward.
/// Joint action id = a1 * n_actions[1] + a2.
struct FiniteGame {
  int n_states = 1;
  std::array<int, 2> n_actions{1, 1};
  std::vector<int> next_state;   // [state][joint]; deterministic transitions
  std::vector<double> reward;    // [state][joint], >= 0

  int joint_count() const noexcept { return n_actions[0] * n_actions[1]; }
  int joint(int a1, int a2) const noexcept { return a1 * n_actions[1] + a2; }
  int local(int player, int joint_id) const noexcept {
    return player == 0 ? joint_id / n_actions[1] : joint_id % n_actions[1];
  }
  int transition(int s, int j) const { return next_state.at(s * joint_count() + j); }
  double r(int s, int j) const { return reward.at(s * joint_count() + j); }
};

FiniteGame random_game(int max_states, int max_actions, Rng& rng);

/// Centralized table Q(S, P) plus one table q_l(S, p_l) per player.
struct TabularQ {
  const FiniteGame* game = nullptr;
  std::vector<double> central;                 // [state][joint]
  std::array<std::vector<double>, 2> local{};  // [state][p_l]

  explicit TabularQ(const FiniteGame& g);

  double& Q(int s, int j) { return central[s * game->joint_count() + j]; }
  double Q(int s, int j) const { return central[s * game->joint_count() + j]; }
  double& q(int l, int s, int a) { return local[l][s * game->n_actions[l] + a]; }
  double q(int l, int s, int a) const { return local[l][s * game->n_actions[l] + a]; }

  /// max over joint P with P^(l) = a of Q(s, P).
  double projection(int l, int s, int a) const;
};

/// Q(S,P) <- (1 - alpha) Q(S,P) + alpha (R + gamma Q(S',P')).
void centralized_sarsa_update(TabularQ& t, int s, int joint, double reward, int s_next,
                              int joint_next, double alpha, double gamma);

/// q_l(S,p) <- max{q_l(S,p), (1 - alpha) q_l(S,p) + alpha (R + gamma q_l(S',p'))}.
void distributed_q_update(TabularQ& t, int l, int s, int a, double reward, int s_next,
                          int a_next, double alpha, double gamma);

/// Deterministic stationary joint policy: one joint action per state.
std::vector<int> random_policy(const FiniteGame& g, Rng& rng);

struct TrajectoryStep {
  int state;
  int joint;
};

/// Trajectory of `steps` + 1 (state, joint action) pairs. With `explore` > 0
/// each joint action is replaced by a uniform one with that probability.
std::vector<TrajectoryStep> rollout(const FiniteGame& g, const std::vector<int>& policy,
                                    int start, int steps, double explore, Rng& rng);

}  // namespace ehrelay
