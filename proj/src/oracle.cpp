#include "ehrelay/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ehrelay {

namespace {

struct Node {
  double acc = 0.0;
  GlobalState state;
  int parent = -1;
  std::array<std::size_t, kNodes> action{};
};

bool dominates(const Node& a, const Node& b) {
  for (int l = 0; l < kNodes; ++l) {
    if (a.state.node[l].battery < b.state.node[l].battery) return false;
    if (a.state.node[l].buffer < b.state.node[l].buffer) return false;
  }
  return a.acc >= b.acc;
}

// Powers past the first one that can empty the buffer only burn energy.
std::size_t useful_actions(const NodeState& n, const ActionGrid& grid, const ScenarioConfig& cfg,
                           const Timing& timing) {
  std::size_t count = 1;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!energy_causality_ok(n, grid[k], 0.0, timing)) break;
    count = k + 1;
    if (rate(grid[k], n.channel, cfg, timing) >= n.buffer) break;
  }
  return count;
}

std::vector<Node> prune(std::vector<Node> cand) {
  std::sort(cand.begin(), cand.end(), [](const Node& a, const Node& b) {
    if (a.acc != b.acc) return a.acc > b.acc;
    for (int l = 0; l < kNodes; ++l) {
      if (a.state.node[l].battery != b.state.node[l].battery)
        return a.state.node[l].battery > b.state.node[l].battery;
      if (a.state.node[l].buffer != b.state.node[l].buffer)
        return a.state.node[l].buffer > b.state.node[l].buffer;
    }
    return false;
  });
  std::vector<Node> kept;
  for (const Node& c : cand) {
    bool dominated = false;
    for (const Node& k : kept)
      if (dominates(k, c)) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(c);
  }
  return kept;
}

OracleResult search(const Realization& real, const ScenarioConfig& cfg,
                    const std::array<ActionGrid, kNodes>& grids, const Timing& timing,
                    const OracleOptions& opts) {
  const int I = real.intervals();
  std::vector<std::vector<Node>> layers;
  layers.push_back({Node{0.0, initial_state(cfg, real.draws(0)), -1, {}}});
  std::size_t peak = 1;
  for (int i = 1; i <= I; ++i) {
    const std::vector<Node>& prev = layers.back();
    std::vector<Node> cand;
    for (std::size_t n = 0; n < prev.size(); ++n) {
      const GlobalState& s = prev[n].state;
      const std::size_t n1 = useful_actions(s.node[0], grids[0], cfg, timing);
      const std::size_t n2 = useful_actions(s.node[1], grids[1], cfg, timing);
      for (std::size_t k1 = 0; k1 < n1; ++k1)
        for (std::size_t k2 = 0; k2 < n2; ++k2) {
          JointAction a;
          a.power = {grids[0][k1], grids[1][k2]};
          StepResult r = step(s, a, real.draws(i), real.arrivals[i - 1], cfg, timing, grids);
          cand.push_back(Node{prev[n].acc + r.outcome.reward, r.next, static_cast<int>(n),
                              {k1, k2}});
        }
    }
    layers.push_back(prune(std::move(cand)));
    peak = std::max(peak, layers.back().size());
    if (layers.back().size() > opts.max_frontier)
      throw OracleRefusal("oracle frontier exceeded " + std::to_string(opts.max_frontier) +
                          " states at interval " + std::to_string(i));
  }
  const std::vector<Node>& last = layers.back();
  std::size_t best = 0;
  for (std::size_t n = 1; n < last.size(); ++n)
    if (last[n].acc > last[best].acc) best = n;

  OracleResult res;
  res.throughput = last[best].acc;
  res.timing = timing;
  res.peak_frontier = peak;
  res.actions.resize(I);
  res.powers.resize(I);
  int idx = static_cast<int>(best);
  for (int i = I; i >= 1; --i) {
    const Node& node = layers[i][idx];
    res.actions[i - 1] = node.action;
    res.powers[i - 1] = {grids[0][node.action[0]], grids[1][node.action[1]]};
    idx = node.parent;
  }
  return res;
}

}  // namespace

OracleResult offline_oracle(const Realization& real, const ScenarioConfig& cfg,
                            const std::array<ActionGrid, kNodes>& grids,
                            const OracleOptions& opts) {
  const int I = real.intervals();
  if (I < 0) throw OracleRefusal("empty realization");
  if (I > opts.max_intervals)
    throw OracleRefusal("oracle limited to " + std::to_string(opts.max_intervals) +
                        " intervals, got " + std::to_string(I));
  if (grids[0].size() * grids[1].size() > opts.max_joint_actions)
    throw OracleRefusal("action grids too fine for the oracle (" +
                        std::to_string(grids[0].size()) + " x " +
                        std::to_string(grids[1].size()) + ")");
  std::vector<Timing> timings = opts.timings;
  if (timings.empty()) {
    timings.push_back(cfg.timing_without_signaling());
    if (cfg.tau_sig > 0.0) timings.push_back(cfg.timing());
  }
  OracleResult best;
  bool have = false;
  for (const Timing& t : timings) {
    OracleResult r = search(real, cfg, grids, t, opts);
    if (!have || r.throughput > best.throughput) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace ehrelay
