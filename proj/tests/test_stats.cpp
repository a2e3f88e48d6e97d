#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fiaplab/montecarlo.hpp"
#include "fiaplab/stats.hpp"

using namespace fiaplab;

namespace {

// Archive with one state column at `state_step` (and, when requested, the
// udraw column of the transition out of it), built from a value generator.
template <typename Gen>
Archive column_archive(int m, int runs, Gen&& value, bool with_udraw = false,
                       std::uint64_t seed = 1, int state_step = 1) {
  Archive archive;
  archive.manifest["M"] = m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int r = 0; r < runs; ++r) {
    for (int n = 0; n < m; ++n) {
      archive.records.push_back({r, state_step, n, 0, ObservableKind::state,
                                 static_cast<double>(value(r, n, rng))});
    }
    if (with_udraw) {
      for (int n = 0; n < m; ++n) {
        archive.records.push_back(
            {r, state_step + 1, n, 0, ObservableKind::udraw, uniform(rng)});
      }
    }
  }
  return archive;
}

}  // namespace

TEST_CASE("empirical_pmf counts exactly") {
  const std::int64_t samples[] = {0, 0, 1};
  const auto pmf = empirical_pmf(samples);
  CHECK(pmf.sample_count == 3);
  CHECK(pmf.counts == std::vector<std::int64_t>{2, 1});
  CHECK(pmf.frequency(0) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(empirical_pmf(std::span<const std::int64_t>{}), std::invalid_argument);
}

TEST_CASE("empirical_pmf of oracle Poisson draws is close in TV") {
  std::mt19937_64 rng(7);
  std::poisson_distribution<std::int64_t> poisson(2.0);
  std::vector<std::int64_t> samples(100000);
  for (auto& s : samples) s = poisson(rng);
  const auto target = compound_poisson_pmf(CompoundPoissonLaw::poisson(2.0), 40);
  CHECK(tv_to_target(samples, target, 40) < 0.01);
}

TEST_CASE("empirical_pgf basics") {
  SUBCASE("constant samples") {
    const std::vector<std::int64_t> twos(50, 2);
    const double grid[] = {0.5, 1.0};
    const auto points = empirical_pgf(twos, grid);
    CHECK(points[0].value == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(points[0].se == doctest::Approx(0.0));
    CHECK(points[1].value == 1.0);
  }
  SUBCASE("Poisson oracle draws against the closed form") {
    std::mt19937_64 rng(11);
    std::poisson_distribution<std::int64_t> poisson(1.5);
    std::vector<std::int64_t> samples(20000);
    for (auto& s : samples) s = poisson(rng);
    const double grid[] = {0.3};
    const auto points = empirical_pgf(samples, grid);
    const double expected = std::exp(-1.5 * 0.7);
    CHECK(std::abs(points[0].value - expected) < 3.0 * points[0].se);
  }
}

TEST_CASE("tv_distance is a metric on the truncated simplex") {
  const auto p = Pmf({0.25, 0.5, 0.25});
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(Pmf::delta(0), Pmf::delta(1)) == doctest::Approx(1.0));

  // direct summation for two Poisson laws
  const auto a = compound_poisson_pmf(CompoundPoissonLaw::poisson(1.0), 60);
  const auto b = compound_poisson_pmf(CompoundPoissonLaw::poisson(1.1), 60);
  long double direct = 0.0L;
  double fa = 1.0;
  for (int k = 0; k <= 60; ++k) {
    if (k > 0) fa *= k;
    direct += std::abs(std::exp(-1.0) * std::pow(1.0, k) / fa -
                       std::exp(-1.1) * std::pow(1.1, k) / fa);
  }
  CHECK(tv_distance(a, b) == doctest::Approx(static_cast<double>(direct) / 2.0).epsilon(1e-9));

  // symmetry and triangle inequality on random triples
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto draw = [&]() {
      std::vector<double> w(5);
      double total = 0.0;
      for (auto& v : w) total += (v = u(rng));
      for (auto& v : w) v /= total;
      return Pmf(w);
    };
    const auto x = draw(), y = draw(), z = draw();
    CHECK(tv_distance(x, y) == doctest::Approx(tv_distance(y, x)).epsilon(1e-14));
    CHECK(tv_distance(x, z) <= tv_distance(x, y) + tv_distance(y, z) + 1e-14);
  }
}

TEST_CASE("pai_covariance on constructed pairs") {
  SUBCASE("perfectly coupled Bernoulli indicators") {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (int i = 0; i < 1000; ++i) {
      const std::int64_t v = i % 2;
      pairs.emplace_back(v, v);
    }
    const std::int64_t set[] = {1};
    const auto est = pai_covariance(pairs, set);
    CHECK(est.covariance == doctest::Approx(0.25).epsilon(0.01));
  }
  SUBCASE("perfectly anticorrelated indicators") {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (int i = 0; i < 1000; ++i) {
      const std::int64_t v = i % 2;
      pairs.emplace_back(v, 1 - v);
    }
    const std::int64_t set[] = {1};
    const auto est = pai_covariance(pairs, set);
    CHECK(est.covariance == doctest::Approx(-0.25).epsilon(0.01));
  }
  SUBCASE("independent oracle draws cover zero most of the time") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.4);
    const std::int64_t set[] = {1};
    int covered = 0;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<std::pair<std::int64_t, std::int64_t>> pairs(400);
      for (auto& p : pairs) p = {coin(rng) ? 1 : 0, coin(rng) ? 1 : 0};
      const auto est = pai_covariance(pairs, set);
      if (est.ci_low <= 0.0 && 0.0 <= est.ci_high) ++covered;
    }
    CHECK(covered >= 90);
  }
  SUBCASE("small samples are refused") {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs(10, {0, 0});
    const std::int64_t set[] = {0};
    CHECK_THROWS_AS(pai_covariance(pairs, set), std::invalid_argument);
  }
}

TEST_CASE("pai_joint_test gap estimates") {
  SUBCASE("independent pairs stay within three standard errors") {
    std::mt19937_64 rng(13);
    std::poisson_distribution<std::int64_t> poisson(1.0);
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs(5000);
    for (auto& p : pairs) p = {poisson(rng), poisson(rng)};
    const auto report = pai_joint_test(pairs, kDefaultPgfGrid, kDefaultPgfGrid, 77);
    CHECK(report.within_three_se);
  }
  SUBCASE("a duplicated coordinate is detected with the exact gap") {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (int i = 0; i < 2000; ++i) {
      const std::int64_t v = (i % 2) * 5;
      pairs.emplace_back(v, v);
    }
    const double grid[] = {0.0};
    const auto report = pai_joint_test(pairs, grid, grid, 77);
    // E[u^Z v^Z] at u=v=0 is P(Z=0)=1/2; the product of the marginals is 1/4
    CHECK(report.points[0].gap == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_FALSE(report.within_three_se);
  }
  SUBCASE("the u = 1 row has gap exactly zero") {
    std::mt19937_64 rng(17);
    std::poisson_distribution<std::int64_t> poisson(0.7);
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs(500);
    for (auto& p : pairs) p = {poisson(rng), poisson(rng)};
    const double us[] = {1.0};
    const auto report = pai_joint_test(pairs, us, kDefaultPgfGrid, 77);
    for (const auto& pt : report.points) CHECK(pt.gap == 0.0);
  }
}

TEST_CASE("tlln_check verdicts") {
  std::poisson_distribution<std::int64_t> poisson(1.0);
  SUBCASE("i.i.d. replicas show the CLT variance ratio") {
    auto iid = [&poisson](int, int, std::mt19937_64& rng) { return poisson(rng); };
    const auto small = column_archive(50, 600, iid, false, 21);
    const auto large = column_archive(200, 600, iid, false, 22);
    const Archive* archives[] = {&small, &large};
    CompactFn indicator{{1.0}};  // f = 1{z = 0}
    const auto report = tlln_check(archives, indicator, 0);
    CHECK(report.monotone_pass);
    CHECK(report.final_pass);
    const double ratio = report.rows[1].estimate / report.rows[0].estimate;
    CHECK(ratio > 0.15);
    CHECK(ratio < 0.40);
  }
  SUBCASE("a constant replica column fails the decay verdict") {
    auto constant = [&poisson](int, int n, std::mt19937_64& rng) {
      static thread_local std::int64_t shared;
      if (n == 0) shared = poisson(rng);
      return shared;
    };
    const auto small = column_archive(50, 600, constant, false, 31);
    const auto large = column_archive(200, 600, constant, false, 32);
    const Archive* archives[] = {&small, &large};
    CompactFn indicator{{1.0}};
    const auto report = tlln_check(archives, indicator, 0);
    CHECK_FALSE(report.overall());
  }
  SUBCASE("f identically zero gives zero variance at every M") {
    auto iid = [&poisson](int, int, std::mt19937_64& rng) { return poisson(rng); };
    const auto small = column_archive(50, 100, iid, false, 41);
    const auto large = column_archive(100, 100, iid, false, 42);
    const Archive* archives[] = {&small, &large};
    CompactFn zero{{}};
    const auto report = tlln_check(archives, zero, 0);
    CHECK(report.rows[0].estimate == 0.0);
    CHECK(report.rows[1].estimate == 0.0);
    // zero variance at both M values cannot strictly decrease
    CHECK_FALSE(report.monotone_pass);
    CHECK(report.final_pass);
  }
  SUBCASE("a single M value is refused") {
    auto iid = [&poisson](int, int, std::mt19937_64& rng) { return poisson(rng); };
    const auto only = column_archive(50, 100, iid, false, 51);
    const Archive* archives[] = {&only};
    CompactFn f{{1.0}};
    CHECK_THROWS_AS(tlln_check(archives, f, 0), std::invalid_argument);
  }
}

TEST_CASE("randomized_tlln_check") {
  std::poisson_distribution<std::int64_t> poisson(1.0);
  auto iid = [&poisson](int, int, std::mt19937_64& rng) { return poisson(rng); };
  const auto small = column_archive(50, 500, iid, true, 61, 0);
  const auto large = column_archive(200, 500, iid, true, 62, 0);
  const Archive* archives[] = {&small, &large};

  SUBCASE("a u-independent table reduces to the plain check") {
    CompactFn2 f2{{}, {{1.0}}};  // 1{z = 0}, no u dependence
    CompactFn f1{{1.0}};
    const auto randomized = randomized_tlln_check(archives, f2, 0);
    const auto plain = tlln_check(archives, f1, 0, /*step=*/0);
    for (int i = 0; i < 2; ++i) {
      CHECK(randomized.rows[i].estimate == doctest::Approx(plain.rows[i].estimate));
      CHECK(randomized.rows[i].mean == doctest::Approx(plain.rows[i].mean));
    }
  }
  SUBCASE("an activation-style table estimates the activation probability") {
    // f(z, u) = 1{u < 0.3} for z >= 1, zero at z = 0: the mean must approach
    // 0.3 * P(Z >= 1)
    CompactFn2 f{{0.3}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0},
                         {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}};
    const auto report = randomized_tlln_check(archives, f, 0);
    const double expected = 0.3 * (1.0 - std::exp(-1.0));
    CHECK(std::abs(report.rows[1].mean - expected) < 4.0 * report.rows[1].mean_se + 1e-3);
  }
  SUBCASE("f identically one has mean one and zero variance") {
    CompactFn2 ones{{}, std::vector<std::vector<double>>(12, {1.0})};
    const auto report = randomized_tlln_check(archives, ones, 0);
    CHECK(report.rows[0].mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.rows[0].estimate == doctest::Approx(0.0));
  }
}

TEST_CASE("arrival_limit_test") {
  std::mt19937_64 rng(71);
  SUBCASE("degenerate all-zero arrivals match the empty target exactly") {
    Archive a;
    a.manifest["M"] = 10;
    Archive b;
    b.manifest["M"] = 100;
    for (int r = 0; r < 200; ++r) {
      a.records.push_back({r, 1, 0, 0, ObservableKind::arrival, 0.0});
      b.records.push_back({r, 1, 0, 0, ObservableKind::arrival, 0.0});
    }
    const Archive* archives[] = {&a, &b};
    const auto report =
        arrival_limit_test(archives, 0, CompoundPoissonLaw::poisson(0.0));
    CHECK(report.rows[0].estimate == 0.0);
    CHECK(report.rows[1].estimate == 0.0);
    CHECK(report.final_pass);
  }
  SUBCASE("oracle Poisson samples pass against their own law") {
    std::poisson_distribution<std::int64_t> poisson(0.75);
    auto make = [&](int m, int runs) {
      Archive archive;
      archive.manifest["M"] = m;
      // noise shrinking with M stands in for the finite-size bias
      std::binomial_distribution<int> contaminate(1, 2.0 / m);
      for (int r = 0; r < runs; ++r) {
        const auto v = poisson(rng) + contaminate(rng);
        archive.records.push_back({r, 1, 0, 0, ObservableKind::arrival,
                                   static_cast<double>(v)});
      }
      return archive;
    };
    const auto small = make(10, 4000);
    const auto large = make(1000, 4000);
    const Archive* archives[] = {&small, &large};
    const auto report =
        arrival_limit_test(archives, 0, CompoundPoissonLaw::poisson(0.75), {.bootstrap_seed = 3});
    CHECK(report.rows.back().estimate < report.threshold);
    CHECK(report.final_pass);
  }
}

TEST_CASE("randomized replica averages recover the activation probability") {
  // f(z, u) = 1{u < sigma(z)} paired with the real engine's draws: the
  // replica-average mean must settle at theta of the initial law.
  InstanceParams params;
  params.node_count = 3;
  params.sigma = {0.0, 0.3};
  params.weights.assign(3, std::vector<std::int64_t>(3, 1));
  const auto spec = builtin_instance("galves-locherbach", params);

  std::vector<Archive> archives;
  for (int m : {40, 160}) {
    RunConfig config;
    config.spec = spec;
    config.replica_count = m;
    config.runs = 600;
    config.initial.assign(3, Pmf::uniform_range(0, 5));
    config.master_seed = 99;
    config.record.node_columns = {0};
    config.record.kinds = {ObservableKind::state, ObservableKind::udraw};
    config.record.record_step_zero = true;
    archives.push_back(run_monte_carlo(config));
  }
  const Archive* views[] = {&archives[0], &archives[1]};

  // one u-bin below sigma, table rows for states 0..9
  CompactFn2 f{{0.3}, {{0.0, 0.0}}};
  f.values.resize(10, {1.0, 0.0});
  f.values[0] = {0.0, 0.0};
  const auto report = randomized_tlln_check(views, f, 0);

  const double theta = theta_from_pmf(Pmf::uniform_range(0, 5), spec.sigma[0]);
  CHECK(theta == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(report.rows.back().mean - theta) <
        3.0 * report.rows.back().mean_se + 1e-9);
  CHECK(report.monotone_pass);
}

TEST_CASE("point estimates are permutation-invariant over samples") {
  std::mt19937_64 rng(23);
  std::poisson_distribution<std::int64_t> poisson(0.8);
  std::vector<std::int64_t> samples(500);
  for (auto& s : samples) s = poisson(rng);
  auto shuffled = samples;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  const auto target = compound_poisson_pmf(CompoundPoissonLaw::poisson(0.8), 20);
  CHECK(tv_to_target(samples, target, 20) == tv_to_target(shuffled, target, 20));

  const auto a = empirical_pgf(samples, kDefaultPgfGrid);
  const auto b = empirical_pgf(shuffled, kDefaultPgfGrid);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == doctest::Approx(b[i].value).epsilon(1e-12));
  }

  std::vector<std::pair<std::int64_t, std::int64_t>> pairs(500);
  for (auto& p : pairs) p = {poisson(rng), poisson(rng)};
  auto shuffled_pairs = pairs;
  std::shuffle(shuffled_pairs.begin(), shuffled_pairs.end(), rng);
  const auto ga = pai_joint_test(pairs, kDefaultPgfGrid, kDefaultPgfGrid, 1);
  const auto gb = pai_joint_test(shuffled_pairs, kDefaultPgfGrid, kDefaultPgfGrid, 1);
  CHECK(ga.max_gap == doctest::Approx(gb.max_gap).epsilon(1e-12));
}

TEST_CASE("endo_arrival_independence_test") {
  std::mt19937_64 rng(91);
  std::poisson_distribution<std::int64_t> poisson(1.2);
  SUBCASE("independent streams pass") {
    Archive archive;
    archive.manifest["M"] = 100;
    for (int r = 0; r < 3000; ++r) {
      archive.records.push_back({r, 1, 0, 0, ObservableKind::endogenous,
                                 static_cast<double>(poisson(rng))});
      archive.records.push_back({r, 1, 0, 0, ObservableKind::arrival,
                                 static_cast<double>(poisson(rng))});
    }
    const auto report = endo_arrival_independence_test(archive, 0, {.bootstrap_seed = 5});
    CHECK(report.within_three_se);
  }
  SUBCASE("a copied coordinate fails") {
    Archive archive;
    archive.manifest["M"] = 100;
    for (int r = 0; r < 3000; ++r) {
      const auto v = poisson(rng);
      archive.records.push_back({r, 1, 0, 0, ObservableKind::endogenous,
                                 static_cast<double>(v)});
      archive.records.push_back({r, 1, 0, 0, ObservableKind::arrival,
                                 static_cast<double>(v)});
    }
    const auto report = endo_arrival_independence_test(archive, 0, {.bootstrap_seed = 5});
    CHECK_FALSE(report.within_three_se);
    CHECK(report.max_gap > 0.01);
  }
}
