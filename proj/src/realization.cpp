#include "ehrelay/realization.hpp"

#include <cmath>
#include <cstring>

namespace ehrelay {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum StreamTag : std::uint64_t { kEnergyTag = 1, kChannelTag = 2, kArrivalTag = 3 };

void mix(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  for (std::uint64_t tag : path) {
    state = key ^ (tag + 0x632be59bd9b4e019ULL);
    key = splitmix64(state);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(path.size())};
  return Rng(seq);
}

double sample_energy(double e_max, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) * e_max;
}

Channel sample_channel(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

double sample_arrival(const ArrivalConfig& arrivals, Rng& rng) {
  if (arrivals.model == ArrivalModel::kBacklogged) return 0.0;
  if (arrivals.lambda <= 0.0) return 0.0;
  std::poisson_distribution<long> p(arrivals.lambda);
  return static_cast<double>(p(rng)) * arrivals.packet_bits;
}

std::uint64_t Realization::hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < e_in.size(); ++i) {
    mix(h, e_in[i].data(), sizeof(double) * kNodes);
    for (const auto& c : channel[i]) {
      const double parts[2] = {c.real(), c.imag()};
      mix(h, parts, sizeof parts);
    }
    mix(h, &arrivals[i], sizeof(double));
  }
  return h;
}

Realization make_realization(const ScenarioConfig& cfg, int intervals, std::uint64_t seed,
                             std::uint64_t episode) {
  const auto n = static_cast<std::size_t>(intervals) + 1;
  Realization r;
  r.e_in.resize(n);
  r.channel.resize(n);
  r.arrivals.resize(n);
  for (int l = 0; l < kNodes; ++l) {
    Rng energy = substream(seed, {episode, kEnergyTag, static_cast<std::uint64_t>(l)});
    Rng chan = substream(seed, {episode, kChannelTag, static_cast<std::uint64_t>(l)});
    for (std::size_t i = 0; i < n; ++i) {
      r.e_in[i][l] = sample_energy(cfg.e_max[l], energy);
      r.channel[i][l] = sample_channel(chan);
    }
  }
  Rng arr = substream(seed, {episode, kArrivalTag});
  for (std::size_t i = 0; i < n; ++i) r.arrivals[i] = sample_arrival(cfg.arrivals, arr);
  return r;
}

}  // namespace ehrelay
