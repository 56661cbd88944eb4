#include "ehrelay/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ehrelay {

namespace {

std::string node_field(const char* name, int l) {
  return std::string(name) + "[" + std::to_string(l) + "]";
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("tau", "must be positive");
  if (!(tau_sig >= 0.0)) throw ConfigError("tau_sig", "must be non-negative");
  if (!(tau_sig < tau)) throw ConfigError("tau_sig", "must be smaller than tau");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth", "must be positive");
  if (!(noise > 0.0)) throw ConfigError("noise", "must be positive");
  for (int l = 0; l < kNodes; ++l) {
    if (!(e_max[l] >= 0.0) || !std::isfinite(e_max[l]))
      throw ConfigError(node_field("e_max", l), "must be finite and non-negative");
    if (!(b_max[l] >= 0.0) || !std::isfinite(b_max[l]))
      throw ConfigError(node_field("b_max", l), "must be finite and non-negative");
    if (!(d_max[l] >= 0.0)) throw ConfigError(node_field("d_max", l), "must be non-negative");
    if (!(delta[l] > 0.0) || !std::isfinite(delta[l]))
      throw ConfigError(node_field("delta", l), "must be positive");
  }
  if (!std::isfinite(d_max[1])) throw ConfigError("d_max[1]", "relay buffer must be finite");
  if (arrivals.model == ArrivalModel::kPoisson) {
    if (!(arrivals.lambda >= 0.0)) throw ConfigError("arrivals.lambda", "must be non-negative");
    if (!(arrivals.packet_bits > 0.0))
      throw ConfigError("arrivals.packet_bits", "must be positive");
    if (!std::isfinite(d_max[0]))
      throw ConfigError("d_max[0]", "must be finite under Poisson arrivals");
  }
}

ActionGrid::ActionGrid(double step, double max_value) : step_(step), max_value_(max_value) {
  if (!(step > 0.0)) throw ConfigError("delta", "grid step must be positive");
  if (!(max_value >= 0.0)) throw ConfigError("b_max", "grid maximum must be non-negative");
  count_ = static_cast<std::size_t>(std::floor(max_value / step * (1.0 + 1e-12))) + 1;
}

double ActionGrid::operator[](std::size_t k) const noexcept {
  return std::min(static_cast<double>(k) * step_, max_value_);
}

std::optional<std::size_t> ActionGrid::index_of(double power) const noexcept {
  if (!(power >= 0.0)) return std::nullopt;
  const double k = std::round(power / step_);
  if (k >= static_cast<double>(count_)) return std::nullopt;
  const auto idx = static_cast<std::size_t>(k);
  if (std::abs((*this)[idx] - power) > 1e-9 * step_) return std::nullopt;
  return idx;
}

std::array<ActionGrid, kNodes> make_grids(const ScenarioConfig& cfg) {
  return {ActionGrid(cfg.delta[0], cfg.b_max[0]), ActionGrid(cfg.delta[1], cfg.b_max[1])};
}

double rate(double power, double abs_h, double noise, double bandwidth, double tau_data) {
  if (power <= 0.0) return 0.0;
  return tau_data * bandwidth * std::log2(1.0 + abs_h * abs_h * power / noise);
}

double rate(double power, const Channel& h, const ScenarioConfig& cfg, const Timing& timing) {
  return rate(power, std::abs(h), cfg.noise, cfg.bandwidth, timing.data());
}

double energy_needed(double power, double sig_power, const Timing& timing) noexcept {
  return timing.tau_sig * sig_power + timing.data() * power;
}

bool energy_causality_ok(const NodeState& s, double power, double sig_power,
                         const Timing& timing) noexcept {
  return energy_needed(power, sig_power, timing) <= s.battery;
}

bool battery_overflow_ok(const NodeState& s, double power, double sig_power, double b_max,
                         const Timing& timing) noexcept {
  return s.battery + s.e_in - timing.data() * power - timing.tau_sig * sig_power <= b_max;
}

bool data_causality_ok(const NodeState& s, double bits_out) noexcept {
  return bits_out <= s.buffer;
}

bool buffer_overflow_ok(const NodeState& s, double bits_out, double bits_in,
                        double d_max) noexcept {
  return s.buffer + bits_in - bits_out <= d_max;
}

GlobalState initial_state(const ScenarioConfig& cfg, const NextDraws& first) {
  GlobalState s;
  s.interval = 1;
  for (int l = 0; l < kNodes; ++l) {
    s.node[l].battery = 0.0;
    s.node[l].buffer = 0.0;
    s.node[l].e_in = first.e_in[l];
    s.node[l].channel = first.channel[l];
  }
  if (cfg.node1_backlogged()) s.node[0].buffer = kUnbounded;
  return s;
}

StepResult step(const GlobalState& s, const JointAction& a, const NextDraws& draws,
                double arrivals, const ScenarioConfig& cfg, const Timing& timing,
                const std::array<ActionGrid, kNodes>& grids) {
  StepResult r;
  IntervalOutcome& out = r.outcome;
  GlobalState& next = r.next;
  next.interval = s.interval + 1;

  for (int l = 0; l < kNodes; ++l) {
    const NodeState& n = s.node[l];
    if (!grids[l].index_of(a.power[l]))
      throw SimulationError("power " + std::to_string(a.power[l]) + " of node " +
                            std::to_string(l + 1) + " is not on the action grid");
    if (!(a.sig_power[l] >= 0.0))
      throw SimulationError("negative signaling power at node " + std::to_string(l + 1));
    if (!energy_causality_ok(n, a.power[l], a.sig_power[l], timing))
      throw SimulationError("energy causality violated at node " + std::to_string(l + 1));

    out.signaled[l] = a.sig_power[l] > 0.0;
    out.signaling_energy[l] = timing.tau_sig * a.sig_power[l];
    out.data_energy[l] = timing.data() * a.power[l];
    out.delivered[l] = std::min(rate(a.power[l], n.channel, cfg, timing), n.buffer);

    const double spent = energy_needed(a.power[l], a.sig_power[l], timing);
    const double pre = (n.battery - spent) + n.e_in;
    next.node[l].battery = std::min(cfg.b_max[l], pre);
    out.battery_overflow[l] = pre - next.node[l].battery;

    next.node[l].e_in = draws.e_in[l];
    next.node[l].channel = draws.channel[l];
  }

  if (cfg.node1_backlogged()) {
    next.node[0].buffer = kUnbounded;
  } else {
    out.arrivals = arrivals;
    const double pre = (s.node[0].buffer - out.delivered[0]) + arrivals;
    next.node[0].buffer = std::min(cfg.d_max[0], pre);
    out.dropped_bits[0] = pre - next.node[0].buffer;
  }
  {
    const double pre = (s.node[1].buffer - out.delivered[1]) + out.delivered[0];
    next.node[1].buffer = std::min(cfg.d_max[1], pre);
    out.dropped_bits[1] = pre - next.node[1].buffer;
  }
  out.reward = out.delivered[1];
  return r;
}

}  // namespace ehrelay
