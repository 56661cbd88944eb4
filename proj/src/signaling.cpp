#include "ehrelay/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ehrelay {

const char* quantity_name(Quantity q) noexcept {
  switch (q) {
    case Quantity::kEnergy: return "energy";
    case Quantity::kBattery: return "battery";
    case Quantity::kChannel: return "channel";
    case Quantity::kBuffer: return "buffer";
  }
  return "?";
}

int bits_required(double v_min, double v_max, double e_quant) {
  if (!(v_max > v_min) || !std::isfinite(v_max - v_min))
    throw std::invalid_argument("quantizer range must be finite with v_max > v_min");
  if (!(e_quant > 0.0)) throw std::invalid_argument("quantization error must be positive");
  const double raw = std::ceil(std::log2((v_max - v_min) / e_quant) - 1.0);
  return raw < 1.0 ? 1 : static_cast<int>(raw);
}

const QuantityRange& QuantizerSpec::at(Quantity q) const {
  const auto& r = range[static_cast<int>(q)];
  if (!r) throw std::invalid_argument(std::string("quantizer spec lacks quantity ") + quantity_name(q));
  return *r;
}

int total_bits(const QuantizerSpec& spec) {
  int sum = 0;
  for (int q = 0; q < kQuantities; ++q) sum += spec.at(static_cast<Quantity>(q)).bits();
  return sum;
}

double quantize(double value, const QuantityRange& range, int bits) {
  if (std::isinf(value) && value > 0) return value;
  const double cells = std::ldexp(1.0, bits);
  const double width = (range.v_max - range.v_min) / cells;
  double idx = std::floor((value - range.v_min) / width);
  idx = std::clamp(idx, 0.0, cells - 1.0);
  return range.v_min + (idx + 0.5) * width;
}

std::optional<double> signaling_power(int bits, double abs_h, double noise, double bandwidth,
                                      double tau_sig) {
  if (bits <= 0) return 0.0;
  if (!(tau_sig > 0.0) || !(abs_h > 0.0)) return std::nullopt;
  const double p = noise / (abs_h * abs_h) * (std::exp2(bits / (bandwidth * tau_sig)) - 1.0);
  if (!std::isfinite(p)) return std::nullopt;
  return p;
}

double default_channel_cap() noexcept { return 4.0 * std::sqrt(0.5); }

std::array<QuantizerSpec, kNodes> make_quantizer_specs(const ScenarioConfig& cfg,
                                                       const SignalingConfig& sig) {
  const double cap = sig.channel_cap > 0.0 ? sig.channel_cap : default_channel_cap();
  auto make = [&](double hi, Quantity q) {
    QuantityRange r;
    r.v_min = 0.0;
    // A degenerate range (e.g. a node that never harvests) still needs a
    // well-defined quantizer; the value it carries is then always 0.
    r.v_max = hi > 0.0 ? hi : 1.0;
    r.e_quant = sig.error_fraction * (r.v_max - r.v_min);
    r.bits_override = sig.bits_override[static_cast<int>(q)];
    return r;
  };
  std::array<QuantizerSpec, kNodes> specs;
  for (int l = 0; l < kNodes; ++l) {
    const double d_hi = std::isfinite(cfg.d_max[l]) ? cfg.d_max[l] : cfg.d_max[1];
    specs[l].range[0] = make(cfg.e_max[l], Quantity::kEnergy);
    specs[l].range[1] = make(cfg.b_max[l], Quantity::kBattery);
    specs[l].range[2] = make(cap, Quantity::kChannel);
    specs[l].range[3] = make(d_hi, Quantity::kBuffer);
  }
  return specs;
}

NodeView exact_view(const NodeState& s) noexcept {
  return {s.e_in, s.battery, std::abs(s.channel), s.buffer};
}

SignalingExchange::SignalingExchange(const ScenarioConfig& cfg,
                                     const std::array<QuantizerSpec, kNodes>& specs,
                                     const Timing& timing)
    : cfg_(&cfg), specs_(specs), timing_(timing) {
  for (int l = 0; l < kNodes; ++l) {
    bits_[l] = total_bits(specs_[l]);
    belief_[l] = NodeView{};
  }
  if (cfg.node1_backlogged()) belief_[0].buffer = kUnbounded;
}

ExchangeResult SignalingExchange::exchange(const GlobalState& s,
                                           const std::array<double, kNodes>& last_sent_bits) {
  ExchangeResult r;
  std::array<double, kNodes> remote_sig_energy{};
  for (int l = 0; l < kNodes; ++l) {
    const NodeState& n = s.node[l];
    const double abs_h = std::abs(n.channel);
    const auto p_sig = signaling_power(bits_[l], abs_h, cfg_->noise, cfg_->bandwidth,
                                       timing_.tau_sig);
    const bool sent = timing_.tau_sig > 0.0 && p_sig && *p_sig > 0.0 &&
                      n.battery >= timing_.tau_sig * *p_sig;
    r.sent[l] = sent;
    r.sig_power[l] = sent ? *p_sig : 0.0;

    NodeView& b = belief_[l];
    if (sent) {
      const QuantizerSpec& q = specs_[l];
      b.e_in = quantize(n.e_in, q.at(Quantity::kEnergy));
      b.battery = quantize(n.battery, q.at(Quantity::kBattery));
      b.abs_channel = quantize(abs_h, q.at(Quantity::kChannel));
      b.buffer = quantize(n.buffer, q.at(Quantity::kBuffer));
      channel_known_[l] = true;
      const auto believed_p = signaling_power(bits_[l], b.abs_channel, cfg_->noise,
                                              cfg_->bandwidth, timing_.tau_sig);
      remote_sig_energy[l] = believed_p ? timing_.tau_sig * *believed_p : 0.0;
    } else {
      b.e_in = 0.0;
      b.battery = 0.0;
      // abs_channel keeps the previous belief
      b.buffer = std::max(0.0, b.buffer - last_sent_bits[l]);
      remote_sig_energy[l] = 0.0;
    }
  }
  for (int self = 0; self < kNodes; ++self) {
    const int other = 1 - self;
    ObservedState& o = r.observed[self];
    o.self = self;
    o.node[self] = exact_view(s.node[self]);
    o.node[other] = belief_[other];
    o.sig_energy[self] = timing_.tau_sig * r.sig_power[self];
    o.sig_energy[other] = remote_sig_energy[other];
    o.remote_signal_received = r.sent[other];
    o.has_remote = true;
  }
  return r;
}

}  // namespace ehrelay
