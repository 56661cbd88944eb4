#include <cmath>
#include <random>

#include "doctest.h"
#include "ehrelay/features.hpp"
#include "helpers.hpp"

using namespace ehrelay;

namespace {

// Own-node context with W = 1, sigma^2 = 1, tau_data = 1.
NodeContext node(const ActionGrid& grid, double budget, double e_in, double abs_h, double buffer,
                 double hbar = 0.0, double b_max = 10.0, double d_max = 20.0) {
  NodeContext n;
  n.view = NodeView{e_in, budget, abs_h, buffer};
  n.budget = budget;
  n.mean_channel = hbar > 0.0 ? hbar : abs_h;
  n.grid = &grid;
  n.b_max = b_max;
  n.d_max = d_max;
  n.noise = 1.0;
  n.bandwidth = 1.0;
  n.tau_data = 1.0;
  return n;
}

int count(const NodeContext& n, bool (*f)(const NodeContext&, std::size_t)) {
  int c = 0;
  for (std::size_t k = 0; k < n.grid->size(); ++k) c += f(n, k);
  return c;
}

}  // namespace

TEST_CASE("water filling examples") {
  const ActionGrid g(0.5, 10.0);
  CHECK(water_fill_power(node(g, 2.0, 2.0, 1.0, 1e9)) == 2.0);
  CHECK(water_fill_power(node(g, 0.0, 2.0, 1.0, 1e9)) == 0.0);
  // deep fade: the water level stays below sigma^2 / |h|
  const NodeContext fade = node(g, 1.0, 0.0, 0.01, 1e9, 1.0);
  CHECK(water_fill_power(fade) == 0.0);
  CHECK(f2(fade, 0));
  // B = 4, E = 2, |h| = 1, |hbar| = 0.5: level 4.5, power 3.5
  const NodeContext n = node(g, 4.0, 2.0, 1.0, 1e9, 0.5);
  CHECK(water_fill_power(n) == doctest::Approx(3.5));
  CHECK(water_fill_index(n) == 7);
  CHECK(f2(n, 7));
  CHECK_FALSE(f2(n, 8));
}

TEST_CASE("water filling rounds to the nearest point, ties down") {
  const ActionGrid g(1.0, 10.0);
  // level = 0.5 (B + E + 2) with |h| = |hbar| = 1: p = 0.5 (B + E)
  CHECK(water_fill_index(node(g, 5.0, 0.0, 1.0, 1e9)) == 2);   // 2.5 -> 2
  CHECK(water_fill_index(node(g, 5.0, 0.2, 1.0, 1e9)) == 3);   // 2.6 -> 3
  CHECK(water_fill_index(node(g, 5.0, 10.0, 1.0, 1e9)) == 5);  // capped at B
}

TEST_CASE("water filling invariant under joint noise / magnitude scaling") {
  const ActionGrid g(0.1, 10.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int k = 0; k < 500; ++k) {
    NodeContext a = node(g, 3.0 * u(rng), u(rng), u(rng), 1e9, u(rng));
    NodeContext b = a;
    const double c = u(rng);
    b.noise *= c;
    b.view.abs_channel *= c;
    b.mean_channel *= c;
    CHECK(water_fill_index(a) == water_fill_index(b));
  }
}

TEST_CASE("f1 examples") {
  const ActionGrid g(1.0, 10.0);
  CHECK(f1(node(g, 5.0, 1.0, 1.0, 1e9), 4));
  CHECK_FALSE(f1(node(g, 5.0, 1.0, 1.0, 1e9), 6));
  CHECK_FALSE(f1(node(g, 10.0, 1.0, 1.0, 1e9), 0));
}

TEST_CASE("f3 examples") {
  const ActionGrid g(1.0, 10.0);
  CHECK(count(node(g, 5.0, 9.0, 1.0, 1e9), f3) == 0);
  const ActionGrid fine(0.1, 2.0);
  const NodeContext n = node(fine, 1.03, 2.5, 1.0, 1e9, 0.0, 2.0);
  CHECK(count(n, f3) == 1);
  CHECK(f3(n, 10));
  const NodeContext empty = node(fine, 0.0, 2.5, 1.0, 1e9, 0.0, 2.0);
  CHECK(count(empty, f3) == 1);
  CHECK(f3(empty, 0));
}

TEST_CASE("f4 examples") {
  const ActionGrid g(1.0, 10.0);
  CHECK(f4(node(g, 5.0, 0.0, 1.0, 0.0), 0));
  CHECK_FALSE(f4(node(g, 5.0, 0.0, 1.0, 1.0), 3));  // log2(4) = 2 > 1
  CHECK_FALSE(f4(node(g, 2.0, 0.0, 1.0, 1e9), 3));
  CHECK(f4(node(g, 5.0, 0.0, 1.0, 2.0), 3));
}

TEST_CASE("f5 examples") {
  const ActionGrid g(1.0, 10.0);
  const NodeContext empty = node(g, 5.0, 0.0, 1.0, 0.0);
  CHECK(count(empty, f5) == 1);
  CHECK(f5(empty, 0));
  const NodeContext backlog = node(g, 5.0, 0.0, 1.0, kUnbounded);
  CHECK(f5(backlog, 5));
  const NodeContext exact = node(g, 9.0, 0.0, 1.0, 3.0);  // rate(7) = 3
  CHECK(f5(exact, 7));
  const NodeContext between = node(g, 9.0, 0.0, 1.0, 2.5);  // rate(5) = 2.58 > 2.5
  CHECK(f5(between, 4));
}

TEST_CASE("f1 is zero wherever energy causality fails") {
  const ActionGrid g(0.25, 10.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const NodeContext n = node(g, 10.0 * u(rng), 12.0 * u(rng), u(rng), 10.0 * u(rng));
    int f3s = 0, f5s = 0;
    for (std::size_t a = 0; a < g.size(); ++a) {
      const double e = g[a];
      if (e > n.budget || n.budget + n.view.e_in - e > n.b_max) CHECK_FALSE(f1(n, a));
      f3s += f3(n, a);
      f5s += f5(n, a);
    }
    CHECK(f3s == (n.view.e_in >= n.b_max ? 1 : 0));
    CHECK(f5s == 1);
  }
}

namespace {

FeatureContext pair_context(const std::array<ActionGrid, kNodes>& grids, int self, double d2,
                            double d_max2) {
  FeatureContext ctx;
  ctx.self = self;
  ctx.node[0] = node(grids[0], 5.0, 0.0, 1.0, kUnbounded, 0.0, 10.0, kUnbounded);
  ctx.node[1] = node(grids[1], 5.0, 0.0, 1.0, d2, 0.0, 10.0, d_max2);
  return ctx;
}

}  // namespace

TEST_CASE("f6 examples") {
  const std::array<ActionGrid, kNodes> grids = {ActionGrid(1.0, 10.0), ActionGrid(1.0, 10.0)};
  // relay full and its estimated power moves nothing: node 1 may only stay silent
  FeatureContext full = pair_context(grids, 0, 20.0, 20.0);
  full.node[1].budget = 0.0;
  full.node[1].view.battery = 0.0;
  for (std::size_t k = 0; k < grids[0].size(); ++k) CHECK(f6(full, k) == (k == 0));

  // empty relay, no inflow expected: any relay power whose rate fits
  FeatureContext empty = pair_context(grids, 1, 0.0, 20.0);
  empty.node[0].budget = 0.0;
  empty.node[0].view.battery = 0.0;
  for (std::size_t k = 0; k < grids[1].size(); ++k) CHECK(f6(empty, k) == (k == 0));
  empty.node[1].view.buffer = 3.0;
  for (std::size_t k = 0; k < grids[1].size(); ++k)
    CHECK(f6(empty, k) == (grids[1][k] <= 7.0));  // log2(1 + p) <= 3
}

TEST_CASE("estimated peer power depletes instead of overshooting") {
  const ActionGrid g(1.0, 10.0);
  // water filling would pick 5 (B = 10, E = 0): rate log2(6) > 2, so the
  // estimate drops to the first power emptying the buffer, p = 3
  const NodeContext n = node(g, 10.0, 0.0, 1.0, 2.0);
  CHECK(water_fill_index(n) == 5);
  CHECK(estimated_peer_index(n) == 3);
  const NodeContext roomy = node(g, 10.0, 0.0, 1.0, 100.0);
  CHECK(estimated_peer_index(roomy) == 5);
}

TEST_CASE("feature vector at an empty start") {
  const std::array<ActionGrid, kNodes> grids = {ActionGrid(1.0, 10.0), ActionGrid(1.0, 10.0)};
  FeatureContext ctx = pair_context(grids, 1, 0.0, 20.0);
  for (int l = 0; l < kNodes; ++l) {
    ctx.node[l].budget = 0.0;
    ctx.node[l].view.battery = 0.0;
    ctx.node[l].view.e_in = 3.0;
  }
  const auto v = feature_vector(ctx, 0);
  CHECK(v == std::array<int, 6>{1, 1, 0, 1, 1, 1});
  const auto w = feature_vector(ctx, 1);
  CHECK(w == std::array<int, 6>{0, 0, 0, 0, 0, 0});
  ctx.has_remote = false;
  CHECK(feature_vector(ctx, 0)[5] == 0);
}

TEST_CASE("proposed basis matches the feature functions") {
  const ScenarioConfig cfg = testutil::defaults();
  const auto grids = make_grids(cfg);
  auto basis = make_basis(BasisConfig{}, cfg, grids[0].size());
  CHECK(basis->size() == 6);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SparseFeatures f;
  for (int trial = 0; trial < 300; ++trial) {
    FeatureContext ctx;
    ctx.self = trial % 2;
    for (int l = 0; l < kNodes; ++l) {
      NodeContext& n = ctx.node[l];
      n.view = NodeView{cfg.e_max[l] * u(rng), cfg.b_max[l] * u(rng), 2.0 * u(rng),
                        l == 0 ? kUnbounded : cfg.d_max[1] * u(rng)};
      n.budget = n.view.battery * u(rng);
      n.mean_channel = u(rng);
      n.grid = &grids[l];
      n.b_max = cfg.b_max[l];
      n.d_max = cfg.d_max[l];
      n.noise = cfg.noise;
      n.bandwidth = cfg.bandwidth;
      n.tau_data = cfg.tau_data();
    }
    std::vector<double> w(6);
    for (double& x : w) x = u(rng);
    std::vector<double> q(grids[ctx.self].size());
    basis->action_values(ctx, w, q);
    for (std::size_t k = 0; k < grids[ctx.self].size(); ++k) {
      basis->features(ctx, k, f);
      const auto v = feature_vector(ctx, k);
      std::array<int, 6> got{};
      for (std::size_t j = 0; j < f.nnz(); ++j) {
        CHECK(f.value[j] == 1.0);
        got[f.index[j]] = 1;
      }
      CHECK(got == v);
      double expect = 0.0;
      for (int j = 0; j < 6; ++j) expect += v[j] * w[j];
      CHECK(q[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("FSR and RBF bases") {
  CHECK(tile_of(0.0, 50) == 0);
  CHECK(tile_of(0.02, 50) == 0);  // boundary goes to the lower tile
  CHECK(tile_of(0.0201, 50) == 1);
  CHECK(tile_of(1.0, 50) == 49);
  CHECK(tile_of(0.5, 4) == 1);

  const ScenarioConfig cfg = testutil::defaults();
  const auto grids = make_grids(cfg);
  BasisConfig bc;
  bc.kind = BasisKind::kFsr;
  auto fsr = make_basis(bc, cfg, grids[0].size());
  CHECK(fsr->size() == 51u * 8u * 50u);
  FeatureContext ctx;
  for (int l = 0; l < kNodes; ++l) {
    ctx.node[l].grid = &grids[l];
    ctx.node[l].view = NodeView{0.5 * cfg.e_max[l], 0.0, 1.0, l == 0 ? kUnbounded : 0.0};
  }
  SparseFeatures f;
  fsr->features(ctx, 3, f);
  CHECK(f.nnz() == 8);
  for (auto idx : f.index) CHECK(idx / (8 * 50) == 3);

  bc.kind = BasisKind::kRbf;
  auto rbf = make_basis(bc, cfg, grids[0].size());
  CHECK(rbf->size() == 51u * 6561u);
  // state exactly on a center: E = B_max-normalized 0.5 etc.
  for (int l = 0; l < kNodes; ++l)
    ctx.node[l].view = NodeView{0.5 * cfg.e_max[l], 0.0, 0.5 * default_channel_cap(),
                                l == 0 ? kUnbounded : cfg.d_max[1]};
  rbf->features(ctx, 0, f);
  double top = 0.0;
  for (double v : f.value) top = std::max(top, v);
  CHECK(top == 1.0);
  std::vector<double> w(rbf->size(), 0.0);
  for (std::size_t k = 0; k < f.nnz(); ++k) w[f.index[k]] = 1.0;
  std::vector<double> q(2);
  rbf->action_values(ctx, w, q);
  double sq = 0.0;
  for (double v : f.value) sq += v;
  CHECK(q[0] == doctest::Approx(sq));
  CHECK(q[1] == 0.0);
}
