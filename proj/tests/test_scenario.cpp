#include <cmath>
#include <random>

#include "doctest.h"
#include "ehrelay/realization.hpp"
#include "ehrelay/scenario.hpp"
#include "helpers.hpp"

using namespace ehrelay;

TEST_CASE("rate examples") {
  CHECK(rate(0.0, 1.0, 1.0, 1e6, 0.99) == 0.0);
  CHECK(rate(1.0, 1.0, 1.0, 1e6, 0.99) == doctest::Approx(9.9e5).epsilon(1e-12));
  CHECK(rate(3.0, 1.0, 1.0, 1e6, 0.99) == doctest::Approx(1.98e6).epsilon(1e-12));
}

TEST_CASE("constraint predicates") {
  const Timing t{1.0, 0.5};  // tau_data = 0.5
  NodeState n;
  n.battery = 5.0;
  CHECK(energy_causality_ok(n, 8.0, 2.0, t));   // 1 + 4 = 5
  CHECK_FALSE(energy_causality_ok(n, 12.0, 0.0, t));
  n.battery = 0.0;
  CHECK(energy_causality_ok(n, 0.0, 0.0, t));

  const Timing full{1.0, 0.0};
  n.battery = 10.0;
  n.e_in = 0.0;
  CHECK(battery_overflow_ok(n, 0.0, 0.0, 10.0, full));
  n.e_in = 1.0;
  CHECK_FALSE(battery_overflow_ok(n, 0.0, 0.0, 10.0, full));
  CHECK(battery_overflow_ok(n, 1.0, 0.0, 10.0, full));

  n.buffer = 100.0;
  CHECK(data_causality_ok(n, 100.0));
  CHECK(buffer_overflow_ok(n, 30.0, 50.0, 150.0));
  CHECK_FALSE(buffer_overflow_ok(n, 0.0, 60.0, 150.0));
}

TEST_CASE("action grid") {
  const ScenarioConfig c = testutil::defaults();
  const auto grids = make_grids(c);
  CHECK(grids[0].size() == 51);
  CHECK(grids[0].max() == c.b_max[0]);
  CHECK(grids[0][0] == 0.0);
  CHECK(grids[0].index_of(grids[0][17]) == 17u);
  CHECK_FALSE(grids[0].index_of(0.5 * grids[0].step()).has_value());
  CHECK_FALSE(grids[0].index_of(-1.0).has_value());

  const ActionGrid g(1.0, 5.0);
  CHECK(g.size() == 6);
  CHECK(g.max() == 5.0);
}

TEST_CASE("initial state and first interval") {
  const ScenarioConfig c = testutil::unit_scenario();
  NextDraws d{{3.0, 4.0}, {testutil::unit_channel(), testutil::unit_channel()}};
  GlobalState s = initial_state(c, d);
  CHECK(s.interval == 1);
  CHECK(std::isinf(s.node[0].buffer));
  CHECK(s.node[1].buffer == 0.0);
  CHECK(s.node[0].battery == 0.0);

  const auto grids = make_grids(c);
  StepResult r = step(s, JointAction{}, d, 0.0, c, c.timing(), grids);
  CHECK(r.outcome.reward == 0.0);
  CHECK(r.outcome.battery_overflow[0] == 0.0);
  CHECK(r.outcome.dropped_bits[1] == 0.0);
  CHECK(r.next.node[0].battery == 3.0);
  CHECK(r.next.node[1].battery == 4.0);
}

TEST_CASE("relay receives log2(3) bits") {
  ScenarioConfig c = testutil::unit_scenario();
  c.arrivals.model = ArrivalModel::kPoisson;
  c.d_max[0] = 50.0;
  const auto grids = make_grids(c);
  GlobalState s;
  s.node[0] = NodeState{0.0, 4.0, testutil::unit_channel(), 10.0};
  s.node[1] = NodeState{0.0, 0.0, testutil::unit_channel(), 0.0};
  JointAction a;
  a.power = {2.0, 0.0};
  NextDraws d{{0.0, 0.0}, {testutil::unit_channel(), testutil::unit_channel()}};
  StepResult r = step(s, a, d, 0.0, c, c.timing(), grids);
  CHECK(r.outcome.delivered[0] == doctest::Approx(std::log2(3.0)).epsilon(1e-15));
  CHECK(r.next.node[1].buffer == r.outcome.delivered[0]);
  CHECK(r.next.node[0].buffer == 10.0 - r.outcome.delivered[0]);
  CHECK(r.next.node[0].battery == 2.0);
}

TEST_CASE("empty relay buffer still charges energy") {
  const ScenarioConfig c = testutil::unit_scenario();
  const auto grids = make_grids(c);
  GlobalState s;
  s.node[0] = NodeState{0.0, 0.0, testutil::unit_channel(), kUnbounded};
  s.node[1] = NodeState{0.0, 5.0, testutil::unit_channel(), 0.0};
  JointAction a;
  a.power = {0.0, 3.0};
  StepResult r = step(s, a, NextDraws{}, 0.0, c, c.timing(), grids);
  CHECK(r.outcome.delivered[1] == 0.0);
  CHECK(r.outcome.data_energy[1] == 3.0);
  CHECK(r.next.node[1].battery == 2.0);
}

TEST_CASE("overflows are clamped and accounted") {
  const ScenarioConfig c = testutil::unit_scenario();
  const auto grids = make_grids(c);
  GlobalState s;
  s.node[0] = NodeState{6.0, 8.0, testutil::unit_channel(3.0), kUnbounded};
  s.node[1] = NodeState{0.0, 0.0, testutil::unit_channel(), 18.0};
  JointAction a;
  a.power = {1.0, 0.0};
  StepResult r = step(s, a, NextDraws{}, 0.0, c, c.timing(), grids);
  CHECK(r.next.node[0].battery == 10.0);
  CHECK(r.outcome.battery_overflow[0] == 3.0);  // 8 - 1 + 6 - 10
  const double in = std::log2(1.0 + 9.0);
  CHECK(r.next.node[1].buffer == 20.0);
  CHECK(r.outcome.dropped_bits[1] == doctest::Approx(18.0 + in - 20.0).epsilon(1e-15));
  CHECK(r.outcome.relay_overflow());
}

TEST_CASE("step rejects infeasible or off-grid actions") {
  const ScenarioConfig c = testutil::unit_scenario();
  const auto grids = make_grids(c);
  GlobalState s;
  s.node[0].battery = 2.0;
  s.node[0].buffer = kUnbounded;
  JointAction a;
  a.power = {3.0, 0.0};
  CHECK_THROWS_AS(step(s, a, NextDraws{}, 0.0, c, c.timing(), grids), SimulationError);
  a.power = {0.5, 0.0};
  CHECK_THROWS_AS(step(s, a, NextDraws{}, 0.0, c, c.timing(), grids), SimulationError);
  a.power = {1.0, 0.0};
  a.sig_power = {-1.0, 0.0};
  CHECK_THROWS_AS(step(s, a, NextDraws{}, 0.0, c, c.timing(), grids), SimulationError);
}

TEST_CASE("validation names the offending field") {
  ScenarioConfig c = testutil::defaults();
  c.tau_sig = c.tau;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "tau_sig");
  }
  c = testutil::defaults();
  c.d_max[1] = kUnbounded;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = testutil::defaults();
  c.arrivals.model = ArrivalModel::kPoisson;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // node 1 buffer still unbounded
  CHECK_NOTHROW(testutil::defaults().validate());
}

TEST_CASE("exogenous draws") {
  Rng rng = substream(7, {1});
  double e = 0.0, h2 = 0.0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) {
    e += sample_energy(3.0, rng);
    h2 += std::norm(sample_channel(rng));
  }
  CHECK(std::abs(e / n - 1.5) < 0.01 * 1.5);
  CHECK(std::abs(h2 / n - 1.0) < 0.01);

  ArrivalConfig none{ArrivalModel::kPoisson, 0.0, 2e5};
  for (int k = 0; k < 100; ++k) CHECK(sample_arrival(none, rng) == 0.0);
  ArrivalConfig two{ArrivalModel::kPoisson, 2.0, 2e5};
  double bits = 0.0;
  for (int k = 0; k < 100000; ++k) bits += sample_arrival(two, rng);
  CHECK(bits / 100000 == doctest::Approx(4e5).epsilon(0.01));
}

TEST_CASE("realizations are paired and reproducible") {
  const ScenarioConfig c = testutil::defaults();
  const Realization a = make_realization(c, 100, 42, 3);
  const Realization b = make_realization(c, 100, 42, 3);
  CHECK(a.hash() == b.hash());
  CHECK(a.intervals() == 100);
  CHECK(a.e_in.size() == 101);
  CHECK(make_realization(c, 100, 42, 4).hash() != a.hash());
  CHECK(make_realization(c, 100, 43, 3).hash() != a.hash());
  // a longer episode extends the shorter one
  const Realization longer = make_realization(c, 150, 42, 3);
  for (int i = 0; i <= 100; ++i) CHECK(longer.e_in[i] == a.e_in[i]);
  for (int i = 0; i <= 100; ++i)
    for (int l = 0; l < kNodes; ++l) {
      CHECK(a.e_in[i][l] >= 0.0);
      CHECK(a.e_in[i][l] <= c.e_max[l]);
    }
}

TEST_CASE("random interval invariants") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    ScenarioConfig c = testutil::unit_scenario(0.1 * u(rng));
    c.b_max = {1.0 + 9.0 * u(rng), 1.0 + 9.0 * u(rng)};
    c.e_max = {2.0 * c.b_max[0] * u(rng), 2.0 * c.b_max[1] * u(rng)};
    c.delta = {c.b_max[0] / 10.0, c.b_max[1] / 7.0};
    c.d_max[1] = 5.0 * u(rng);
    const auto grids = make_grids(c);
    GlobalState s;
    for (int l = 0; l < kNodes; ++l) {
      s.node[l].battery = c.b_max[l] * u(rng);
      s.node[l].e_in = c.e_max[l] * u(rng);
      s.node[l].channel = {u(rng), u(rng)};
    }
    s.node[0].buffer = kUnbounded;
    s.node[1].buffer = c.d_max[1] * u(rng);
    JointAction a;
    for (int l = 0; l < kNodes; ++l) {
      std::size_t k = static_cast<std::size_t>(u(rng) * grids[l].size());
      while (k > 0 && !energy_causality_ok(s.node[l], grids[l][k], 0.0, c.timing())) --k;
      a.power[l] = grids[l][k];
    }
    const StepResult r = step(s, a, NextDraws{}, 0.0, c, c.timing(), grids);
    for (int l = 0; l < kNodes; ++l) {
      CHECK(r.next.node[l].battery >= 0.0);
      CHECK(r.next.node[l].battery <= c.b_max[l]);
      CHECK(r.outcome.delivered[l] <= s.node[l].buffer);
    }
    CHECK(r.next.node[1].buffer >= 0.0);
    CHECK(r.next.node[1].buffer <= c.d_max[1]);
  }
}
