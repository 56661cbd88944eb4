#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ehrelay {

inline constexpr int kNodes = 2;
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Raised for invalid configuration values; `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ArrivalModel { kBacklogged, kPoisson };

struct ArrivalConfig {
  ArrivalModel model = ArrivalModel::kBacklogged;
  double lambda = 0.0;        // mean packets per interval
  double packet_bits = 2e5;   // bits per packet
};

/// Interval timing. Arms that do not signal run with tau_sig = 0.
struct Timing {
  double tau = 1.0;
  double tau_sig = 0.0;
  double data() const noexcept { return tau - tau_sig; }
};

/// Resolved physical constants of one scenario point. All quantities are
/// concrete numbers; the derivation rules (dB levels, beta, grid fraction)
/// live in ScenarioParams.
struct ScenarioConfig {
  double tau = 1.0;
  double tau_sig = 0.01;
  double bandwidth = 1e6;
  double noise = 1.0;
  std::array<double, kNodes> e_max{};
  std::array<double, kNodes> b_max{};
  std::array<double, kNodes> d_max{};  // kUnbounded allowed
  std::array<double, kNodes> delta{};
  ArrivalConfig arrivals;

  Timing timing() const noexcept { return {tau, tau_sig}; }
  Timing timing_without_signaling() const noexcept { return {tau, 0.0}; }
  double tau_data() const noexcept { return tau - tau_sig; }
  bool node1_backlogged() const noexcept {
    return arrivals.model == ArrivalModel::kBacklogged;
  }

  /// Throws ConfigError naming the first violated field.
  void validate() const;
};

}  // namespace ehrelay
