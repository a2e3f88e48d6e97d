#include <random>

#include <stdexcept>

#include "doctest.h"
#include "fiaplab/fiap.hpp"

using namespace fiaplab;

namespace {

FiapSpec gl_spec(int k, double p) {
  InstanceParams params;
  params.node_count = k;
  params.sigma = {0.0, p};
  params.weights.assign(k, std::vector<std::int64_t>(k, 1));
  return builtin_instance("galves-locherbach", params);
}

}  // namespace

TEST_CASE("validate_spec accepts the basic spiking model") {
  auto spec = gl_spec(3, 0.3);
  CHECK(&validate_spec(spec) == &spec);
}

TEST_CASE("validate_spec reports the first violated condition") {
  SUBCASE("state 0 must not activate") {
    auto spec = gl_spec(3, 0.3);
    spec.sigma[1] = SigmaTable({0.1, 0.3});
    CHECK_THROWS_WITH_AS(validate_spec(spec),
                         "node 1: sigma: state 0 must not activate (sigma(0) != 0)",
                         std::invalid_argument);
  }
  SUBCASE("sigma must be non-decreasing") {
    auto spec = gl_spec(3, 0.3);
    spec.sigma[0] = SigmaTable({0.0, 0.5, 0.4});
    CHECK_THROWS_WITH_AS(validate_spec(spec), "node 0: sigma: table must be non-decreasing",
                         std::invalid_argument);
  }
  SUBCASE("at least two nodes") {
    auto spec = gl_spec(2, 0.3);
    spec.node_count = 1;
    CHECK_THROWS_AS(validate_spec(spec), std::invalid_argument);
  }
  SUBCASE("unbounded interactions are rejected") {
    auto spec = gl_spec(2, 0.3);
    spec.interaction[0][1] = StateFn::identity();
    CHECK_THROWS_AS(validate_spec(spec), std::invalid_argument);
  }
  SUBCASE("interactions above the declared bound are rejected") {
    auto spec = gl_spec(2, 0.3);
    spec.interaction[0][1] = StateFn::constant(5);
    CHECK_THROWS_AS(validate_spec(spec), std::invalid_argument);
  }
}

TEST_CASE("step_network resolves the deterministic two-node spike exchange") {
  // Both nodes certain to spike: state resets and each receives one unit.
  auto spec = gl_spec(2, 1.0);
  NetworkState state{{2, 3}, 0};
  const double u[] = {0.5, 0.5};
  const auto outcome = step_network(spec, state, u);
  CHECK(outcome.activated[0] == 1);
  CHECK(outcome.activated[1] == 1);
  CHECK(outcome.endogenous[0] == 0);
  CHECK(outcome.endogenous[1] == 0);
  CHECK(outcome.next_state.x[0] == 1);
  CHECK(outcome.next_state.x[1] == 1);
  CHECK(outcome.next_state.step == 1);
}

TEST_CASE("a network at rest stays on the idle branch") {
  auto spec = builtin_instance("tcp-aimd", {.node_count = 3, .sigma = {0.0, 0.5}});
  NetworkState state{{0, 0, 0}, 0};
  const double u[] = {0.0, 0.0, 0.0};
  const auto outcome = step_network(spec, state, u);
  for (int i = 0; i < 3; ++i) {
    CHECK(outcome.activated[i] == 0);
    // g2(0) = 0 + 1 for the additive-increase map, no arrivals
    CHECK(outcome.next_state.x[i] == 1);
    CHECK(outcome.arrivals[i] == 0);
  }
}

TEST_CASE("ties between the uniform and sigma count as no activation") {
  auto spec = gl_spec(2, 0.5);
  NetworkState state{{1, 1}, 0};
  const double u[] = {0.5, 0.49999};
  const auto outcome = step_network(spec, state, u);
  CHECK(outcome.activated[0] == 0);
  CHECK(outcome.activated[1] == 1);
}

TEST_CASE("gordon-newell moves one unit along the cycle") {
  InstanceParams params;
  params.node_count = 3;
  params.sigma = {0.0, 1.0};
  auto spec = builtin_instance("gordon-newell", params);

  // Nodes 0 and 2 hold work and are forced to serve; node 1 is empty.
  NetworkState state{{1, 0, 2}, 0};
  const double u[] = {0.0, 0.0, 0.0};
  const auto outcome = step_network(spec, state, u);
  CHECK(outcome.activated[0] == 1);
  CHECK(outcome.activated[1] == 0);
  CHECK(outcome.activated[2] == 1);
  // worked out by following the two unit transfers by hand
  CHECK(outcome.next_state.x == std::vector<std::int64_t>{1, 1, 1});
  CHECK(outcome.next_state.x[0] + outcome.next_state.x[1] + outcome.next_state.x[2] == 3);
}

TEST_CASE("builtin instances match their definitions") {
  SUBCASE("gordon-newell interaction is the cyclic shift") {
    InstanceParams params;
    params.node_count = 3;
    params.sigma = {0.0, 1.0};
    const auto spec = builtin_instance("gordon-newell", params);
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        if (i == j) continue;
        CHECK(spec.h(i, j)(5) == (i == (j + 1) % 3 ? 1 : 0));
      }
    }
  }
  SUBCASE("unit-weight galves-locherbach is symmetric") {
    const auto spec = gl_spec(5, 0.3);
    CHECK(spec.symmetric());
    CHECK(spec.frag_on[2](7) == 0);
    CHECK(spec.frag_off[2](7) == 7);
  }
  SUBCASE("tcp-aimd halves on activation and grows otherwise") {
    const auto spec = builtin_instance("tcp-aimd", {.node_count = 2, .sigma = {0.0, 0.5}});
    CHECK(spec.frag_on[0](5) == 2);
    CHECK(spec.frag_off[0](5) == 6);
  }
  SUBCASE("unknown names and missing parameters are rejected") {
    CHECK_THROWS_AS(builtin_instance("lorenz", {.node_count = 2, .sigma = {0.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(builtin_instance("galves-locherbach", {.node_count = 2, .sigma = {0.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(builtin_instance("gordon-newell", {.node_count = 2}),
                    std::invalid_argument);
  }
}

TEST_CASE("aggregation identity holds for random specs and states") {
  std::mt19937 gen(1234);
  std::uniform_int_distribution<int> k_dist(2, 6);
  std::uniform_int_distribution<std::int64_t> x_dist(0, 9);
  std::uniform_real_distribution<double> u_dist(0.0, 1.0);

  for (int trial = 0; trial < 200; ++trial) {
    const int k = k_dist(gen);
    FiapSpec spec;
    spec.node_count = k;
    for (int i = 0; i < k; ++i) {
      spec.sigma.emplace_back(std::vector<double>{0.0, u_dist(gen)});
      spec.frag_on.push_back(trial % 2 ? StateFn::zero() : StateFn::half());
      spec.frag_off.push_back(trial % 3 ? StateFn::identity() : StateFn::increment());
    }
    spec.interaction.assign(k, std::vector<StateFn>(k, StateFn::zero()));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i != j) spec.interaction[i][j] = StateFn::table({x_dist(gen) % 3, x_dist(gen) % 3});
      }
    }
    spec.interaction_bound = 2;
    validate_spec(spec);

    NetworkState state;
    for (int i = 0; i < k; ++i) state.x.push_back(x_dist(gen));
    std::vector<double> u(k);
    for (auto& v : u) v = u_dist(gen);

    const auto outcome = step_network(spec, state, u);
    for (int i = 0; i < k; ++i) {
      CHECK(outcome.next_state.x[i] == outcome.endogenous[i] + outcome.arrivals[i]);
      if (state.x[i] == 0) CHECK(outcome.activated[i] == 0);
      if (outcome.activated[i] && spec.frag_on[i].kind() == StateFn::Kind::zero) {
        CHECK(outcome.endogenous[i] == 0);
      }
    }
  }
}

TEST_CASE("trajectories are reproducible and horizon-1 equals one step") {
  auto spec = gl_spec(4, 0.4);
  NetworkState init{{1, 2, 0, 3}, 0};

  const auto a = simulate_trajectory(spec, init, 50, 777);
  const auto b = simulate_trajectory(spec, init, 50, 777);
  REQUIRE(a.size() == 50);
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(a[t].next_state.x == b[t].next_state.x);
  }

  const auto single = simulate_trajectory(spec, init, 1, 777);
  CHECK(single[0].next_state.x == a[0].next_state.x);
}

TEST_CASE("gordon-newell trajectories conserve total mass") {
  InstanceParams params;
  params.node_count = 4;
  params.sigma = {0.0, 0.7};
  const auto spec = builtin_instance("gordon-newell", params);
  NetworkState init{{3, 1, 0, 2}, 0};
  const std::int64_t total = 6;

  const auto path = simulate_trajectory(spec, init, 100, 31337);
  for (const auto& outcome : path) {
    std::int64_t sum = 0;
    for (auto v : outcome.next_state.x) sum += v;
    CHECK(sum == total);
  }
}
