#include <random>

#include <stdexcept>

#include "doctest.h"
#include "fiaplab/spec_io.hpp"

using namespace fiaplab;
using nlohmann::json;

TEST_CASE("spec JSON round-trips") {
  std::mt19937 gen(2718);
  std::uniform_int_distribution<int> k_dist(2, 5);
  std::uniform_real_distribution<double> p_dist(0.05, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = k_dist(gen);
    FiapSpec spec;
    spec.node_count = k;
    for (int i = 0; i < k; ++i) {
      const double p = p_dist(gen);
      spec.sigma.emplace_back(std::vector<double>{0.0, p, std::min(1.0, p * 1.5)});
      spec.frag_on.push_back(i % 2 ? StateFn::zero() : StateFn::half());
      spec.frag_off.push_back(i % 2 ? StateFn::identity() : StateFn::increment());
    }
    spec.interaction.assign(k, std::vector<StateFn>(k, StateFn::zero()));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        spec.interaction[i][j] =
            (i + j) % 2 ? StateFn::constant(2) : StateFn::table({0, 1, 2});
      }
    }
    spec.interaction_bound = 2;
    validate_spec(spec);

    const auto parsed = fiap_spec_from_json(fiap_spec_to_json(spec));
    CHECK(parsed.node_count == spec.node_count);
    CHECK(parsed.sigma == spec.sigma);
    CHECK(parsed.frag_on == spec.frag_on);
    CHECK(parsed.frag_off == spec.frag_off);
    CHECK(parsed.interaction == spec.interaction);
    CHECK(parsed.interaction_bound == spec.interaction_bound);
  }
}

TEST_CASE("shared spec fields expand across nodes") {
  const auto j = json::parse(R"({
    "K": 3,
    "sigma": [0, 0.25, 0.5],
    "g1": "zero",
    "g2": "identity",
    "h": {"constant": 1},
    "H_max": 1
  })");
  const auto spec = fiap_spec_from_json(j);
  CHECK(spec.node_count == 3);
  CHECK(spec.symmetric());
  CHECK(spec.h(0, 1)(4) == 1);
  CHECK(spec.h(2, 0)(0) == 1);
}

TEST_CASE("spec parse errors carry field context") {
  CHECK_THROWS_WITH_AS(fiap_spec_from_json(json::parse(R"({"K": 3})")),
                       "spec: missing field 'sigma'", std::invalid_argument);
  const auto bad_sigma = json::parse(R"({
    "K": 2, "sigma": [0.2, 0.4], "g1": "zero", "g2": "identity",
    "h": {"constant": 1}, "H_max": 1
  })");
  CHECK_THROWS_AS(fiap_spec_from_json(bad_sigma), std::invalid_argument);
  const auto unbounded = json::parse(R"({
    "K": 2, "sigma": [0, 0.4], "g1": "zero", "g2": "identity",
    "h": "identity"
  })");
  CHECK_THROWS_AS(fiap_spec_from_json(unbounded), std::invalid_argument);
}

TEST_CASE("law JSON forms") {
  CHECK(pmf_from_json(json::parse(R"({"uniform": [0, 5]})")) == Pmf::uniform_range(0, 5));
  CHECK(pmf_from_json(json::parse(R"({"delta": 3})")) == Pmf::delta(3));
  CHECK(pmf_from_json(json::parse("[0.5, 0.25, 0.25]")) == Pmf({0.5, 0.25, 0.25}));
  const auto geo = pmf_from_json(json::parse(R"({"geometric": 0.5})"));
  CHECK(geo(0) == doctest::Approx(0.5));
  const auto round_trip = pmf_from_json(pmf_to_json(geo));
  CHECK(round_trip == geo);
  CHECK_THROWS_AS(pmf_from_json(json::parse(R"({"gaussian": 1})")), std::invalid_argument);
}

TEST_CASE("initial law lists expand or map per node") {
  const auto shared = initial_laws_from_json(json::parse(R"({"uniform": [0, 2]})"), 3);
  CHECK(shared.size() == 3);
  CHECK(shared[0] == shared[2]);
  const auto per_node =
      initial_laws_from_json(json::parse(R"([{"delta": 1}, {"delta": 2}])"), 2);
  CHECK(per_node[0] == Pmf::delta(1));
  CHECK(per_node[1] == Pmf::delta(2));
  CHECK_THROWS_AS(initial_laws_from_json(json::parse(R"([{"delta": 1}])"), 2),
                  std::invalid_argument);
}

TEST_CASE("compound-law files round-trip") {
  const auto law = CompoundPoissonLaw::make(1.7, Pmf({0.0, 0.25, 0.5, 0.25}));
  const auto back = compound_law_from_json(compound_law_to_json(law));
  CHECK(back.rate == doctest::Approx(law.rate).epsilon(1e-15));
  CHECK(back.jumps == law.jumps);
  CHECK_THROWS_AS(compound_law_from_json(json::parse(R"({"rate": 1})")),
                  std::invalid_argument);
}

TEST_CASE("optional spec sections") {
  const auto j = json::parse(R"({
    "K": 4, "sigma": [0, 0.3], "g1": "zero", "g2": "identity",
    "h": {"constant": 1}, "H_max": 1,
    "partition": [[0, 1], [2, 3]],
    "exogenous": {"inputs": {"poisson": 0.5}, "outputs": "identity"}
  })");
  const auto extended = extended_spec_from_json(j);
  REQUIRE(extended.partition.has_value());
  CHECK(extended.partition->size() == 2);
  REQUIRE(extended.exogenous.has_value());
  CHECK(extended.exogenous->inputs.size() == 4);
  CHECK(extended.exogenous->inputs[2].poisson);
  CHECK(extended.exogenous->inputs[2].rate == 0.5);
  CHECK(extended.exogenous->output[3].kind() == StateFn::Kind::identity);

  SUBCASE("absent sections mean the base model") {
    auto bare = j;
    bare.erase("partition");
    bare.erase("exogenous");
    const auto base_only = extended_spec_from_json(bare);
    CHECK_FALSE(base_only.partition.has_value());
    CHECK_FALSE(base_only.exogenous.has_value());
  }
  SUBCASE("invalid partitions are rejected") {
    auto bad = j;
    bad["partition"] = json::parse("[[0, 1], [1, 2, 3]]");
    CHECK_THROWS_AS(extended_spec_from_json(bad), std::invalid_argument);
  }
}

TEST_CASE("run config round-trips through its manifest form") {
  const auto j = json::parse(R"({
    "spec": {"K": 2, "sigma": [0, 0.5], "g1": "zero", "g2": "identity",
             "h": {"constant": 1}, "H_max": 1},
    "M": 8, "R": 4, "horizon": 2, "seed": 99,
    "initial": {"uniform": [0, 3]},
    "record": {"pairs": [[0, 0]], "columns": [1],
               "kinds": ["state", "arrival"], "steps": [2]}
  })");
  const auto config = run_config_from_json(j);
  CHECK(config.replica_count == 8);
  CHECK(config.runs == 4);
  CHECK(config.record.pairs.size() == 1);
  CHECK(config.record.node_columns == std::vector<int>{1});
  CHECK(config.record.steps == std::vector<int>{2});

  const auto back = run_config_from_json(run_config_to_json(config));
  CHECK(back.replica_count == config.replica_count);
  CHECK(back.master_seed == config.master_seed);
  CHECK(back.initial == config.initial);
  CHECK(back.record.steps == config.record.steps);
}
