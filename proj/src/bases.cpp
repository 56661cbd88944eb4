#include <cmath>

#include "ehrelay/features.hpp"

namespace ehrelay {

namespace {

// The six binary features with the per-state targets (water-filling,
// depletion, battery-depletion and the peer estimate for f6) computed once
// and shared across every power index.
class ProposedBasis final : public FeatureBasis {
 public:
  explicit ProposedBasis(bool with_remote) : with_remote_(with_remote) {}

  std::string name() const override { return with_remote_ ? "proposed" : "proposed-local"; }
  std::size_t size() const override { return with_remote_ ? 6 : 5; }

  void features(const FeatureContext& ctx, std::size_t action,
                SparseFeatures& out) const override {
    out.clear();
    const Targets t = targets(ctx);
    emit(ctx, t, action, out);
  }

  void action_values(const FeatureContext& ctx, std::span<const double> w,
                     std::span<double> out) const override {
    const Targets t = targets(ctx);
    SparseFeatures f;
    for (std::size_t k = 0; k < out.size(); ++k) {
      f.clear();
      emit(ctx, t, k, f);
      out[k] = f.dot(w);
    }
  }

 private:
  struct Targets {
    std::size_t water_fill = 0;
    std::size_t depletion = 0;
    long battery_depletion = -1;  // -1: f3 inactive
    double peer_rate = 0.0;
  };

  Targets targets(const FeatureContext& ctx) const {
    const NodeContext& n = ctx.own();
    Targets t;
    t.water_fill = water_fill_index(n);
    t.depletion = depletion_index(n);
    if (n.view.e_in >= n.b_max) {
      for (std::size_t k = 0; k < n.grid->size(); ++k)
        if (f3(n, k)) t.battery_depletion = static_cast<long>(k);
    }
    if (use_f6(ctx)) {
      const NodeContext& peer = ctx.node[1 - ctx.self];
      t.peer_rate = peer.rate_at(estimated_peer_index(peer));
    }
    return t;
  }

  bool use_f6(const FeatureContext& ctx) const { return with_remote_ && ctx.has_remote; }

  void emit(const FeatureContext& ctx, const Targets& t, std::size_t k,
            SparseFeatures& out) const {
    const NodeContext& n = ctx.own();
    if (f1(n, k)) out.push(0, 1.0);
    if (k == t.water_fill) out.push(1, 1.0);
    if (t.battery_depletion >= 0 && k == static_cast<std::size_t>(t.battery_depletion))
      out.push(2, 1.0);
    if (f4(n, k)) out.push(3, 1.0);
    if (k == t.depletion) out.push(4, 1.0);
    if (use_f6(ctx)) {
      const NodeContext& relay = ctx.node[1];
      const double level = ctx.self == 0
                               ? n.rate_at(k) + relay.view.buffer - t.peer_rate
                               : t.peer_rate + relay.view.buffer - n.rate_at(k);
      if (level >= 0.0 && level <= relay.d_max) out.push(5, 1.0);
    }
  }

  bool with_remote_;
};

constexpr int kStateDims = 8;

class FsrBasis final : public FeatureBasis {
 public:
  FsrBasis(const ScenarioConfig& cfg, std::size_t n_actions, int tiles, double cap)
      : cfg_(cfg), n_actions_(n_actions), tiles_(tiles), cap_(cap) {}

  std::string name() const override { return "fsr"; }
  std::size_t size() const override { return n_actions_ * block(); }

  void features(const FeatureContext& ctx, std::size_t action,
                SparseFeatures& out) const override {
    out.clear();
    const auto s = normalized_state(ctx, cfg_, cap_);
    const std::size_t base = action * block();
    for (int d = 0; d < kStateDims; ++d)
      out.push(static_cast<std::uint32_t>(base + d * tiles_ + tile_of(s[d], tiles_)), 1.0);
  }

  void action_values(const FeatureContext& ctx, std::span<const double> w,
                     std::span<double> out) const override {
    const auto s = normalized_state(ctx, cfg_, cap_);
    std::array<std::size_t, kStateDims> offset{};
    for (int d = 0; d < kStateDims; ++d) offset[d] = d * tiles_ + tile_of(s[d], tiles_);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const std::size_t base = k * block();
      double q = 0.0;
      for (int d = 0; d < kStateDims; ++d) q += w[base + offset[d]];
      out[k] = q;
    }
  }

 private:
  std::size_t block() const { return static_cast<std::size_t>(kStateDims) * tiles_; }

  ScenarioConfig cfg_;
  std::size_t n_actions_;
  int tiles_;
  double cap_;
};

class RbfBasis final : public FeatureBasis {
 public:
  RbfBasis(const ScenarioConfig& cfg, std::size_t n_actions, int centers, double width,
           double cap)
      : cfg_(cfg), n_actions_(n_actions), centers_(centers), cap_(cap) {
    n_kernels_ = 1;
    for (int d = 0; d < kStateDims; ++d) n_kernels_ *= static_cast<std::size_t>(centers_);
    const double spacing = centers_ > 1 ? 1.0 / (centers_ - 1) : 1.0;
    width_ = width > 0.0 ? width : 0.5 * spacing;
  }

  std::string name() const override { return "rbf"; }
  std::size_t size() const override { return n_actions_ * n_kernels_; }

  void features(const FeatureContext& ctx, std::size_t action,
                SparseFeatures& out) const override {
    out.clear();
    const std::vector<double> k = kernels(ctx);
    const std::size_t base = action * n_kernels_;
    for (std::size_t c = 0; c < n_kernels_; ++c)
      out.push(static_cast<std::uint32_t>(base + c), k[c]);
  }

  void action_values(const FeatureContext& ctx, std::span<const double> w,
                     std::span<double> out) const override {
    const std::vector<double> k = kernels(ctx);
    for (std::size_t a = 0; a < out.size(); ++a) {
      const double* wa = w.data() + a * n_kernels_;
      double q = 0.0;
      for (std::size_t c = 0; c < n_kernels_; ++c) q += k[c] * wa[c];
      out[a] = q;
    }
  }

  /// Kernel values exp(-|s - c|^2 / (2 width^2)) for every center c.
  std::vector<double> kernels(const FeatureContext& ctx) const {
    const auto s = normalized_state(ctx, cfg_, cap_);
    const double spacing = centers_ > 1 ? 1.0 / (centers_ - 1) : 0.0;
    std::vector<std::vector<double>> factor(kStateDims, std::vector<double>(centers_));
    for (int d = 0; d < kStateDims; ++d)
      for (int j = 0; j < centers_; ++j) {
        const double diff = s[d] - j * spacing;
        factor[d][j] = std::exp(-diff * diff / (2.0 * width_ * width_));
      }
    std::vector<double> k(n_kernels_);
    for (std::size_t c = 0; c < n_kernels_; ++c) {
      std::size_t rest = c;
      double v = 1.0;
      for (int d = 0; d < kStateDims; ++d) {
        v *= factor[d][rest % centers_];
        rest /= centers_;
      }
      k[c] = v;
    }
    return k;
  }

 private:
  ScenarioConfig cfg_;
  std::size_t n_actions_;
  int centers_;
  double width_ = 0.25;
  double cap_;
  std::size_t n_kernels_ = 1;
};

}  // namespace

std::unique_ptr<FeatureBasis> make_basis(const BasisConfig& bc, const ScenarioConfig& cfg,
                                         std::size_t n_actions) {
  switch (bc.kind) {
    case BasisKind::kProposed:
      return std::make_unique<ProposedBasis>(bc.use_remote);
    case BasisKind::kFsr:
      if (bc.fsr_tiles < 1) throw ConfigError("features.fsr_tiles", "must be at least 1");
      return std::make_unique<FsrBasis>(cfg, n_actions, bc.fsr_tiles, bc.channel_cap);
    case BasisKind::kRbf:
      if (bc.rbf_centers < 1) throw ConfigError("features.rbf_centers", "must be at least 1");
      return std::make_unique<RbfBasis>(cfg, n_actions, bc.rbf_centers, bc.rbf_width,
                                        bc.channel_cap);
  }
  throw ConfigError("features.basis", "unknown basis");
}

}  // namespace ehrelay
