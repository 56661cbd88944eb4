#include "ehrelay/episode.hpp"

#include <algorithm>
#include <cmath>

namespace ehrelay {

namespace {

constexpr std::uint64_t kAgentTag = 0xa9e7;

void record(EpisodeMetrics& m, const GlobalState& s, const JointAction& a,
            const IntervalOutcome& o, int episode, const TraceSink& sink) {
  ++m.intervals;
  m.throughput += o.delivered[1];
  if (o.relay_overflow()) m.relay_overflows += 1.0;
  m.relay_dropped_bits += o.dropped_bits[1];
  m.tx_dropped_bits += o.dropped_bits[0];
  m.arrived_bits += o.arrivals;
  for (int l = 0; l < kNodes; ++l) {
    m.battery_overflow += o.battery_overflow[l];
    m.signaling_energy += o.signaling_energy[l];
  }
  if (!sink) return;
  TraceRow row;
  row.episode = episode;
  row.interval = s.interval;
  for (int l = 0; l < kNodes; ++l) {
    row.e_in[l] = s.node[l].e_in;
    row.battery[l] = s.node[l].battery;
    row.abs_channel[l] = std::abs(s.node[l].channel);
    row.buffer[l] = s.node[l].buffer;
    row.power[l] = a.power[l];
    row.sig_power[l] = a.sig_power[l];
    row.delivered[l] = o.delivered[l];
  }
  row.dropped_bits = o.dropped_bits[0] + o.dropped_bits[1];
  row.battery_overflow = o.battery_overflow[0] + o.battery_overflow[1];
  sink(row);
}

std::size_t feasible_count(const NodeState& n, double sig_power, const ActionGrid& grid,
                           const Timing& timing) {
  std::size_t count = 1;
  while (count < grid.size() && energy_causality_ok(n, grid[count], sig_power, timing)) ++count;
  return count;
}

}  // namespace

Arm parse_arm(const std::string& name) {
  for (Arm a : all_arms())
    if (arm_name(a) == name) return a;
  throw ConfigError("experiment.arms", "unknown arm '" + name + "'");
}

std::string arm_name(Arm arm) {
  switch (arm) {
    case Arm::kMarl: return "marl";
    case Arm::kMarlFsr: return "marl_fsr";
    case Arm::kMarlRbf: return "marl_rbf";
    case Arm::kNoCoop: return "nocoop";
    case Arm::kHasty: return "hasty";
    case Arm::kOracle: return "oracle";
  }
  return "?";
}

const std::vector<Arm>& all_arms() {
  static const std::vector<Arm> arms = {Arm::kMarl,   Arm::kMarlFsr, Arm::kMarlRbf,
                                        Arm::kNoCoop, Arm::kHasty,   Arm::kOracle};
  return arms;
}

bool arm_signals(Arm arm) noexcept {
  return arm == Arm::kMarl || arm == Arm::kMarlFsr || arm == Arm::kMarlRbf;
}

bool arm_learns(Arm arm) noexcept { return arm_signals(arm) || arm == Arm::kNoCoop; }

ArmRunner::ArmRunner(const ArmSettings& settings) : settings_(settings) {
  settings_.scenario.validate();
  grids_ = make_grids(settings_.scenario);
  if (!arm_learns(settings_.arm)) return;
  specs_ = make_quantizer_specs(settings_.scenario, settings_.signaling);
  BasisConfig bc = settings_.basis;
  switch (settings_.arm) {
    case Arm::kMarlFsr: bc.kind = BasisKind::kFsr; break;
    case Arm::kMarlRbf: bc.kind = BasisKind::kRbf; break;
    case Arm::kNoCoop:
      bc.kind = BasisKind::kProposed;
      bc.use_remote = false;
      break;
    default: bc.kind = BasisKind::kProposed; break;
  }
  if (bc.channel_cap <= 0.0) bc.channel_cap = settings_.signaling.channel_cap;
  for (int l = 0; l < kNodes; ++l) {
    std::shared_ptr<const FeatureBasis> basis = make_basis(bc, settings_.scenario, grids_[l].size());
    agents_[l] = std::make_unique<SarsaAgent>(
        basis, settings_.learning,
        substream(settings_.seed, {kAgentTag, static_cast<std::uint64_t>(l)}));
  }
}

EpisodeMetrics ArmRunner::run_episode(const Realization& real, int episode,
                                      const TraceSink& sink) {
  if (real.intervals() < 0) throw SimulationError("empty realization");
  if (arm_learns(settings_.arm)) return run_learning(real, episode, sink);
  if (settings_.arm == Arm::kHasty) return run_hasty(real, episode, sink);
  return run_oracle(real, episode, sink);
}

EpisodeMetrics ArmRunner::run_learning(const Realization& real, int episode,
                                       const TraceSink& sink) {
  const ScenarioConfig& cfg = settings_.scenario;
  const bool signals = arm_signals(settings_.arm);
  const Timing timing = signals ? cfg.timing() : cfg.timing_without_signaling();
  const int I = real.intervals();
  if (!settings_.learning.persist_weights)
    for (auto& a : agents_) a->reset_memory();

  SignalingExchange exchange(cfg, specs_, timing);
  std::array<double, kNodes> last_sent{};

  struct Decision {
    std::array<FeatureContext, kNodes> ctx;
    std::array<std::size_t, kNodes> action{};
    std::array<double, kNodes> sig_power{};
    std::array<SparseFeatures, kNodes> f;
  };

  auto schedule_index = [&](int l, int i) -> long {
    if (settings_.learning.indexing == ScheduleIndexing::kGlobal)
      return agents_[l]->memory().global_step + 1;
    return i;
  };

  auto decide = [&](const GlobalState& s, Decision& d) {
    std::array<ObservedState, kNodes> obs{};
    if (signals) {
      ExchangeResult ex = exchange.exchange(s, last_sent);
      obs = ex.observed;
      d.sig_power = ex.sig_power;
    } else {
      for (int l = 0; l < kNodes; ++l) {
        obs[l].self = l;
        obs[l].node[l] = exact_view(s.node[l]);
        obs[l].has_remote = false;
      }
      d.sig_power = {0.0, 0.0};
    }
    for (int l = 0; l < kNodes; ++l) {
      AgentMemory& mem = agents_[l]->memory();
      const int peer = 1 - l;
      mem.channel[l].observe(std::abs(s.node[l].channel));
      if (signals && exchange.channel_known(peer))
        mem.channel[peer].observe(exchange.belief(peer).abs_channel);
      const std::array<double, kNodes> means = {mem.channel[0].mean(), mem.channel[1].mean()};
      d.ctx[l] = make_feature_context(obs[l], means, cfg, timing, grids_);
      const std::size_t feasible =
          feasible_count(s.node[l], d.sig_power[l], grids_[l], timing);
      const double eps = harmonic(schedule_index(l, s.interval));
      d.action[l] = agents_[l]->select_action(d.ctx[l], feasible, eps);
      agents_[l]->features(d.ctx[l], d.action[l], d.f[l]);
    }
  };

  EpisodeMetrics m;
  GlobalState s = initial_state(cfg, real.draws(0));
  Decision now;
  decide(s, now);
  for (int i = 1; i <= I; ++i) {
    JointAction a;
    for (int l = 0; l < kNodes; ++l) a.power[l] = grids_[l][now.action[l]];
    a.sig_power = now.sig_power;
    StepResult r = step(s, a, real.draws(i), real.arrivals[i - 1], cfg, timing, grids_);
    record(m, s, a, r.outcome, episode, sink);
    last_sent = r.outcome.delivered;
    s = r.next;

    Decision next;
    decide(s, next);
    for (int l = 0; l < kNodes; ++l) {
      const double alpha = harmonic(schedule_index(l, i));
      agents_[l]->update(now.f[l], r.outcome.reward, next.f[l], alpha);
      ++agents_[l]->memory().global_step;
    }
    now = std::move(next);
  }
  return m;
}

EpisodeMetrics ArmRunner::run_hasty(const Realization& real, int episode, const TraceSink& sink) {
  const ScenarioConfig& cfg = settings_.scenario;
  const Timing timing = cfg.timing_without_signaling();
  EpisodeMetrics m;
  GlobalState s = initial_state(cfg, real.draws(0));
  for (int i = 1; i <= real.intervals(); ++i) {
    JointAction a;
    for (int l = 0; l < kNodes; ++l)
      a.power[l] = grids_[l][hasty_action(l, s.node[l], grids_[l], cfg, timing)];
    StepResult r = step(s, a, real.draws(i), real.arrivals[i - 1], cfg, timing, grids_);
    record(m, s, a, r.outcome, episode, sink);
    s = r.next;
  }
  return m;
}

EpisodeMetrics ArmRunner::run_oracle(const Realization& real, int episode,
                                     const TraceSink& sink) {
  const OracleResult res = offline_oracle(real, settings_.scenario, grids_, settings_.oracle);
  return replay_schedule(real, settings_.scenario, res.timing, grids_, res.powers, episode, sink);
}

EpisodeMetrics replay_schedule(const Realization& real, const ScenarioConfig& cfg,
                               const Timing& timing, const std::array<ActionGrid, kNodes>& grids,
                               const std::vector<std::array<double, kNodes>>& powers,
                               int episode, const TraceSink& sink) {
  EpisodeMetrics m;
  GlobalState s = initial_state(cfg, real.draws(0));
  const int I = std::min<int>(real.intervals(), static_cast<int>(powers.size()));
  for (int i = 1; i <= I; ++i) {
    JointAction a;
    a.power = powers[i - 1];
    StepResult r = step(s, a, real.draws(i), real.arrivals[i - 1], cfg, timing, grids);
    record(m, s, a, r.outcome, episode, sink);
    s = r.next;
  }
  return m;
}

}  // namespace ehrelay
