#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "ehrelay/config.hpp"
#include "ehrelay/scenario.hpp"

namespace ehrelay {

using Rng = std::mt19937_64;

/// Deterministic substream derived from a root seed and a path of tags.
/// Distinct paths give statistically independent generators.
Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

double sample_energy(double e_max, Rng& rng);
/// Circularly symmetric complex Gaussian, unit variance (|h| is Rayleigh).
Channel sample_channel(Rng& rng);
/// Bits arriving at node 1 in one interval under the configured model.
double sample_arrival(const ArrivalConfig& arrivals, Rng& rng);

/// All exogenous randomness of one episode: energy, channels and arrivals for
/// intervals 1..I plus one look-ahead interval used for the final learning
/// update. Index 0 is interval 1.
struct Realization {
  std::vector<std::array<double, kNodes>> e_in;
  std::vector<std::array<Channel, kNodes>> channel;
  std::vector<double> arrivals;

  int intervals() const noexcept { return static_cast<int>(e_in.size()) - 1; }
  NextDraws draws(int index) const { return {e_in.at(index), channel.at(index)}; }

  /// FNV-1a over the raw bit patterns; equal hashes mean paired draws.
  std::uint64_t hash() const noexcept;
};

/// Draws are taken from per-node, per-quantity substreams of
/// (seed, episode), so every policy arm at the same seed and episode index
/// sees the same sequence regardless of its actions.
Realization make_realization(const ScenarioConfig& cfg, int intervals, std::uint64_t seed,
                             std::uint64_t episode);

}  // namespace ehrelay
