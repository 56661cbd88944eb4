#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ehrelay/config.hpp"
#include "ehrelay/scenario.hpp"
#include "ehrelay/signaling.hpp"

namespace ehrelay {

/// Running arithmetic mean of observed channel magnitudes.
class ChannelEstimate {
 public:
  void observe(double abs_h) noexcept {
    ++count_;
    mean_ += (abs_h - mean_) / static_cast<double>(count_);
  }
  double mean() const noexcept { return mean_; }
  long count() const noexcept { return count_; }

 private:
  double mean_ = 0.0;
  long count_ = 0;
};

/// Everything a feature needs to know about one node, from the point of
/// view of the deciding node.
struct NodeContext {
  NodeView view;
  double budget = 0.0;        // energy usable in the data phase
  double mean_channel = 0.0;  // running mean of |h|
  const ActionGrid* grid = nullptr;
  double b_max = 0.0;
  double d_max = 0.0;
  double noise = 1.0;
  double bandwidth = 1.0;
  double tau_data = 1.0;

  double rate_at(std::size_t k) const;
  bool affordable(std::size_t k) const noexcept { return tau_data * (*grid)[k] <= budget; }
  /// Largest grid index whose data energy fits the budget (0 if none).
  std::size_t max_affordable() const noexcept;
};

struct FeatureContext {
  int self = 0;
  std::array<NodeContext, kNodes> node{};
  bool has_remote = true;

  const NodeContext& own() const noexcept { return node[self]; }
};

FeatureContext make_feature_context(const ObservedState& obs,
                                    const std::array<double, kNodes>& mean_channel,
                                    const ScenarioConfig& cfg, const Timing& timing,
                                    const std::array<ActionGrid, kNodes>& grids);

/// Water-filling between the current channel and the running channel mean,
/// rounded to the nearest grid point (ties toward the lower one) and clamped
/// to what the budget affords. Returns a grid index.
std::size_t water_fill_index(const NodeContext& n);
/// Unrounded water-filling power.
double water_fill_power(const NodeContext& n);

/// Grid index whose rate comes closest to the buffer from below among
/// affordable powers; 0 when nothing positive qualifies.
std::size_t depletion_index(const NodeContext& n);

/// Estimated transmit power of node `node` as seen from its peer: water
/// filling, scaled down to the smallest power that empties the buffer when
/// the water-filling rate would exceed it.
std::size_t estimated_peer_index(const NodeContext& n);

bool f1(const NodeContext& n, std::size_t k);
bool f2(const NodeContext& n, std::size_t k);
bool f3(const NodeContext& n, std::size_t k);
bool f4(const NodeContext& n, std::size_t k);
bool f5(const NodeContext& n, std::size_t k);
bool f6(const FeatureContext& ctx, std::size_t k);

inline constexpr std::size_t kProposedFeatures = 6;
std::array<int, kProposedFeatures> feature_vector(const FeatureContext& ctx, std::size_t k);

/// Sparse feature vector: (index, value) pairs with non-zero values.
struct SparseFeatures {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  void clear() noexcept {
    index.clear();
    value.clear();
  }
  void push(std::uint32_t i, double v) {
    index.push_back(i);
    value.push_back(v);
  }
  std::size_t nnz() const noexcept { return index.size(); }
  double dot(std::span<const double> w) const noexcept;
};

enum class BasisKind { kProposed, kFsr, kRbf };
BasisKind parse_basis(const std::string& name);
std::string basis_name(BasisKind kind);

struct BasisConfig {
  BasisKind kind = BasisKind::kProposed;
  bool use_remote = true;  // f6 / the remote half of the state
  int fsr_tiles = 50;
  int rbf_centers = 3;     // per dimension
  double rbf_width = 0.0;  // in normalized units; <= 0 selects half the center spacing
  double channel_cap = 0.0;
};

/// Linear value-function basis over (observed state, power index).
class FeatureBasis {
 public:
  virtual ~FeatureBasis() = default;
  virtual std::string name() const = 0;
  virtual std::size_t size() const = 0;
  virtual void features(const FeatureContext& ctx, std::size_t action,
                        SparseFeatures& out) const = 0;
  /// q-values of actions [0, out.size()).
  virtual void action_values(const FeatureContext& ctx, std::span<const double> w,
                             std::span<double> out) const;
};

std::unique_ptr<FeatureBasis> make_basis(const BasisConfig& bc, const ScenarioConfig& cfg,
                                         std::size_t n_actions);

/// Normalized 8-dimensional state (E1, E2, B1, B2, |h1|, |h2|, D1, D2) in [0, 1].
std::array<double, 8> normalized_state(const FeatureContext& ctx, const ScenarioConfig& cfg,
                                       double channel_cap);

/// Tile index on [0, 1] split into `tiles` equal tiles; a value on a
/// boundary belongs to the lower tile.
int tile_of(double x, int tiles) noexcept;

}  // namespace ehrelay
