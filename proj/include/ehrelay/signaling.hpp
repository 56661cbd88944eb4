#pragma once

#include <array>
#include <optional>

#include "ehrelay/config.hpp"
#include "ehrelay/scenario.hpp"

namespace ehrelay {

enum class Quantity { kEnergy = 0, kBattery = 1, kChannel = 2, kBuffer = 3 };
inline constexpr int kQuantities = 4;
const char* quantity_name(Quantity q) noexcept;

/// Bits needed by a uniform quantizer so that the reconstruction error of any
/// value in [v_min, v_max] stays within e_quant:
///   L = ceil(log2((v_max - v_min) / e_quant) - 1), floored at 1.
/// Throws std::invalid_argument for an empty range or non-positive error.
int bits_required(double v_min, double v_max, double e_quant);

struct QuantityRange {
  double v_min = 0.0;
  double v_max = 1.0;
  double e_quant = 0.01;
  std::optional<int> bits_override;

  int bits() const { return bits_override ? *bits_override : bits_required(v_min, v_max, e_quant); }
};

/// Quantizer settings for the four quantities one node signals.
struct QuantizerSpec {
  std::array<std::optional<QuantityRange>, kQuantities> range;

  const QuantityRange& at(Quantity q) const;
};

/// Sum of the per-quantity bit counts. Throws std::invalid_argument if any
/// of the four quantities is missing.
int total_bits(const QuantizerSpec& spec);

/// Midpoint-reconstruction uniform quantizer with 2^bits cells over
/// [v_min, v_max]. Out-of-range inputs are clamped; +inf passes through.
double quantize(double value, const QuantityRange& range, int bits);
inline double quantize(double value, const QuantityRange& range) {
  return quantize(value, range, range.bits());
}

/// Power needed to push `bits` through the signaling phase:
///   p_sig = sigma^2 / |h|^2 * (2^(bits / (W tau_sig)) - 1).
/// Returns nullopt when signaling is impossible (|h| = 0 or tau_sig = 0 with bits > 0).
std::optional<double> signaling_power(int bits, double abs_h, double noise, double bandwidth,
                                      double tau_sig);

struct SignalingConfig {
  double error_fraction = 0.01;  // e_quant as a fraction of each quantity's range
  double channel_cap = 0.0;      // |h| range upper bound; <= 0 selects 4 * sqrt(1/2)
  std::array<std::optional<int>, kQuantities> bits_override{};
};

double default_channel_cap() noexcept;

/// Per-node quantizer spec with ranges E in [0, E_max], B in [0, B_max],
/// |h| in [0, cap], D in [0, D_max] (an unbounded buffer borrows the relay's range).
std::array<QuantizerSpec, kNodes> make_quantizer_specs(const ScenarioConfig& cfg,
                                                       const SignalingConfig& sig);

/// Quantities of one node as known (exactly or by belief) to an observer.
/// `battery` is the level at the start of the interval, before signaling.
struct NodeView {
  double e_in = 0.0;
  double battery = 0.0;
  double abs_channel = 0.0;
  double buffer = 0.0;
};

NodeView exact_view(const NodeState& s) noexcept;

/// What one node knows after the signaling phase.
struct ObservedState {
  int self = 0;
  std::array<NodeView, kNodes> node{};
  std::array<double, kNodes> sig_energy{};  // own exact; remote from the believed channel
  bool remote_signal_received = false;
  bool has_remote = true;                    // false for observers that never exchange

  /// Energy available for the data phase at node l.
  double data_budget(int l) const noexcept { return node[l].battery - sig_energy[l]; }
};

struct ExchangeResult {
  std::array<ObservedState, kNodes> observed{};
  std::array<double, kNodes> sig_power{};  // 0 for a node that stays silent
  std::array<bool, kNodes> sent{};
};

/// Per-episode causal-knowledge exchange with the fallback beliefs used when a
/// node cannot afford to signal: E = 0, B = 0, |h| = previous belief,
/// D = max(0, previous belief - bits that node sent last interval).
class SignalingExchange {
 public:
  SignalingExchange(const ScenarioConfig& cfg, const std::array<QuantizerSpec, kNodes>& specs,
                    const Timing& timing);

  /// `last_sent_bits[l]` are the bits node l delivered in the previous interval
  /// (both are known to both nodes: one is received, the other is the reward).
  ExchangeResult exchange(const GlobalState& s, const std::array<double, kNodes>& last_sent_bits);

  /// Belief about node l held by the other node after the latest exchange.
  const NodeView& belief(int l) const noexcept { return belief_[l]; }
  /// True once node l's belief carries a channel value from a received signal.
  bool channel_known(int l) const noexcept { return channel_known_[l]; }
  int bits(int l) const noexcept { return bits_[l]; }

 private:
  const ScenarioConfig* cfg_;
  std::array<QuantizerSpec, kNodes> specs_;
  std::array<int, kNodes> bits_{};
  Timing timing_;
  std::array<NodeView, kNodes> belief_{};
  std::array<bool, kNodes> channel_known_{};
};

}  // namespace ehrelay
