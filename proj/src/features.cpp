#include "ehrelay/features.hpp"

#include <algorithm>
#include <cmath>

namespace ehrelay {

double NodeContext::rate_at(std::size_t k) const {
  return rate((*grid)[k], view.abs_channel, noise, bandwidth, tau_data);
}

std::size_t NodeContext::max_affordable() const noexcept {
  if (!(budget > 0.0)) return 0;
  const double step = grid->step();
  double guess = std::floor(budget / (tau_data * step));
  auto k = static_cast<std::size_t>(std::min(guess, static_cast<double>(grid->size() - 1)));
  while (k > 0 && !affordable(k)) --k;
  while (k + 1 < grid->size() && affordable(k + 1)) ++k;
  return k;
}

FeatureContext make_feature_context(const ObservedState& obs,
                                    const std::array<double, kNodes>& mean_channel,
                                    const ScenarioConfig& cfg, const Timing& timing,
                                    const std::array<ActionGrid, kNodes>& grids) {
  FeatureContext ctx;
  ctx.self = obs.self;
  ctx.has_remote = obs.has_remote;
  for (int l = 0; l < kNodes; ++l) {
    NodeContext& n = ctx.node[l];
    n.view = obs.node[l];
    n.budget = obs.data_budget(l);
    n.mean_channel = mean_channel[l];
    n.grid = &grids[l];
    n.b_max = cfg.b_max[l];
    n.d_max = cfg.d_max[l];
    n.noise = cfg.noise;
    n.bandwidth = cfg.bandwidth;
    n.tau_data = timing.data();
  }
  return ctx;
}

double water_fill_power(const NodeContext& n) {
  const double h = n.view.abs_channel;
  const double hbar = n.mean_channel;
  if (!(h > 0.0) || !(hbar > 0.0)) return 0.0;
  const double budget = std::max(0.0, n.budget);
  const double level =
      0.5 * (budget / n.tau_data + n.view.e_in / n.tau_data + n.noise * (1.0 / hbar + 1.0 / h));
  return std::min(budget / n.tau_data, std::max(0.0, level - n.noise / h));
}

std::size_t water_fill_index(const NodeContext& n) {
  const double p = water_fill_power(n);
  if (!(p > 0.0)) return 0;
  const double x = p / n.grid->step();
  double k = std::ceil(x - 0.5);  // nearest, ties toward the lower point
  k = std::clamp(k, 0.0, static_cast<double>(n.grid->size() - 1));
  return std::min(static_cast<std::size_t>(k), n.max_affordable());
}

std::size_t depletion_index(const NodeContext& n) {
  const std::size_t top = n.max_affordable();
  std::size_t best = 0;
  double best_rate = 0.0;
  for (std::size_t k = 1; k <= top; ++k) {
    const double r = n.rate_at(k);
    if (r > n.view.buffer) break;  // rate is non-decreasing in power
    if (r > best_rate) {
      best = k;
      best_rate = r;
    }
  }
  return best;
}

std::size_t estimated_peer_index(const NodeContext& n) {
  const std::size_t wf = water_fill_index(n);
  if (n.rate_at(wf) <= n.view.buffer) return wf;
  for (std::size_t k = 0; k < wf; ++k)
    if (n.rate_at(k) >= n.view.buffer) return k;
  return wf;
}

bool f1(const NodeContext& n, std::size_t k) {
  const double e = n.tau_data * (*n.grid)[k];
  return (n.budget + n.view.e_in - e <= n.b_max) && (e <= n.budget);
}

bool f2(const NodeContext& n, std::size_t k) { return k == water_fill_index(n); }

bool f3(const NodeContext& n, std::size_t k) {
  if (!(n.view.e_in >= n.b_max)) return false;
  const double budget = std::max(0.0, n.budget);
  double target = std::floor(budget / (n.tau_data * n.grid->step()));
  target = std::min(target, static_cast<double>(n.grid->size() - 1));
  return k == static_cast<std::size_t>(target);
}

bool f4(const NodeContext& n, std::size_t k) {
  return n.rate_at(k) <= n.view.buffer && n.budget >= n.tau_data * (*n.grid)[k];
}

bool f5(const NodeContext& n, std::size_t k) { return k == depletion_index(n); }

bool f6(const FeatureContext& ctx, std::size_t k) {
  const NodeContext& tx = ctx.node[0];
  const NodeContext& relay = ctx.node[1];
  double level = 0.0;
  if (ctx.self == 0) {
    const double outflow = relay.rate_at(estimated_peer_index(relay));
    level = tx.rate_at(k) + relay.view.buffer - outflow;
  } else {
    const double inflow = tx.rate_at(estimated_peer_index(tx));
    level = inflow + relay.view.buffer - relay.rate_at(k);
  }
  return level >= 0.0 && level <= relay.d_max;
}

std::array<int, kProposedFeatures> feature_vector(const FeatureContext& ctx, std::size_t k) {
  const NodeContext& n = ctx.own();
  return {f1(n, k), f2(n, k), f3(n, k), f4(n, k), f5(n, k), ctx.has_remote ? f6(ctx, k) : 0};
}

double SparseFeatures::dot(std::span<const double> w) const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) s += value[i] * w[index[i]];
  return s;
}

void FeatureBasis::action_values(const FeatureContext& ctx, std::span<const double> w,
                                 std::span<double> out) const {
  SparseFeatures f;
  for (std::size_t k = 0; k < out.size(); ++k) {
    features(ctx, k, f);
    out[k] = f.dot(w);
  }
}

int tile_of(double x, int tiles) noexcept {
  if (!(x > 0.0)) return 0;
  const double t = std::ceil(x * tiles) - 1.0;
  return static_cast<int>(std::clamp(t, 0.0, static_cast<double>(tiles - 1)));
}

std::array<double, 8> normalized_state(const FeatureContext& ctx, const ScenarioConfig& cfg,
                                       double channel_cap) {
  const double cap = channel_cap > 0.0 ? channel_cap : default_channel_cap();
  auto norm = [](double x, double hi) {
    if (!(hi > 0.0)) return 0.0;
    if (std::isinf(hi)) return 1.0;
    return std::clamp(x / hi, 0.0, 1.0);
  };
  std::array<double, 8> s{};
  for (int l = 0; l < kNodes; ++l) {
    const NodeView& v = ctx.node[l].view;
    s[0 + l] = norm(v.e_in, cfg.e_max[l]);
    s[2 + l] = norm(v.battery, cfg.b_max[l]);
    s[4 + l] = norm(v.abs_channel, cap);
    s[6 + l] = std::isinf(v.buffer) ? 1.0 : norm(v.buffer, cfg.d_max[l]);
  }
  return s;
}

BasisKind parse_basis(const std::string& name) {
  if (name == "proposed") return BasisKind::kProposed;
  if (name == "fsr") return BasisKind::kFsr;
  if (name == "rbf") return BasisKind::kRbf;
  throw ConfigError("features.basis", "unknown basis '" + name + "'");
}

std::string basis_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::kProposed: return "proposed";
    case BasisKind::kFsr: return "fsr";
    case BasisKind::kRbf: return "rbf";
  }
  return "?";
}

}  // namespace ehrelay
