#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fiaplab/analytics.hpp"
#include "fiaplab/archive.hpp"

namespace fiaplab {

// PGFs of integer laws are determined by their values on any set with an
// accumulation point; this coarse grid suffices at the tolerances in use.
inline constexpr double kDefaultPgfGrid[] = {0.0, 0.25, 0.5, 0.75, 1.0};

struct EmpiricalPmf {
  std::vector<std::int64_t> counts;  // counts[v] = occurrences of value v
  std::int64_t sample_count = 0;
  std::string source;

  double frequency(std::int64_t value) const;
  Pmf to_pmf() const;
};

EmpiricalPmf empirical_pmf(std::span<const std::int64_t> samples, std::string source = {});

struct PgfPoint {
  double z = 0.0;
  double value = 0.0;
  double se = 0.0;  // jackknife standard error of the mean
};

std::vector<PgfPoint> empirical_pgf(std::span<const std::int64_t> samples,
                                    std::span<const double> z_grid);

// Total variation over the union of the stored supports; mass past either
// support is folded into a common sentinel bin.
double tv_distance(const Pmf& p, const Pmf& q);

// Total variation between an empirical sample and an analytic target with
// the support cut at `cut`; both tails fold into one bin.
double tv_to_target(std::span<const std::int64_t> samples, const Pmf& target,
                    std::int64_t cut);

struct CovarianceEstimate {
  double covariance = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;  // 95% normal-approximation interval
};

// Sample covariance of the indicators 1{Z1 in B}, 1{Z2 in B}.
CovarianceEstimate pai_covariance(
    std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
    std::span<const std::int64_t> member_set);

struct JointGapPoint {
  double u = 0.0, v = 0.0;
  double gap = 0.0;  // E[u^Z1 v^Z2] - E[u^Z1] E[v^Z2]
  double se = 0.0;   // bootstrap standard error
};

struct JointIndependenceReport {
  std::vector<JointGapPoint> points;
  double max_gap = 0.0;     // max over the grid of |gap|
  double se_at_max = 0.0;
  bool within_three_se = true;  // every grid point within 3 se of zero
  std::uint64_t bootstrap_seed = 0;

  nlohmann::json to_json() const;
};

JointIndependenceReport pai_joint_test(
    std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
    std::span<const double> u_grid, std::span<const double> v_grid,
    std::uint64_t bootstrap_seed = 0, int bootstrap_reps = 200);

// Compactly supported function table on {0, 1, ...}; zero past the table.
struct CompactFn {
  std::vector<double> values;
  double operator()(std::int64_t state) const;
};

// f(state, u) tabulated per state and piecewise constant in u over the bins
// cut by the ascending interior edges.
struct CompactFn2 {
  std::vector<double> u_edges;
  std::vector<std::vector<double>> values;  // [state][bin], bins = edges + 1

  double operator()(std::int64_t state, double u) const;
};

struct StatRow {
  int m = 0;
  double estimate = 0.0;
  double se = 0.0;
  double mean = 0.0;     // replica-average mean (decay tests only)
  double mean_se = 0.0;
  bool pass = true;
};

struct StatReport {
  std::string test_name;
  std::vector<StatRow> rows;  // ascending M
  bool monotone_pass = true;  // decay across the sweep
  bool final_pass = true;     // threshold / stability condition
  double threshold = 0.0;
  std::string note;

  bool overall() const { return monotone_pass && final_pass; }
  nlohmann::json to_json() const;
};

// L2 decay of the replica averages (1/M) sum_n f(X_{n,node}) across runs:
// passes iff the across-run variance strictly decreases along the M sweep
// (monotone_pass) and the means stay within 3 se of a common constant
// (final_pass). Archives must carry the node's state column at `step`.
StatReport tlln_check(std::span<const Archive* const> archives, const CompactFn& f,
                      int node, int step = 1);

// Same decay criteria for (1/M) sum_n f(X_{n,node}, U_{n,node}), pairing
// the states at `state_step` with the uniforms consumed by the transition
// out of it (recorded at state_step + 1). Archives must carry the state
// column at `state_step` and the udraw column at the following step.
StatReport randomized_tlln_check(std::span<const Archive* const> archives,
                                 const CompactFn2& f, int node, int state_step = 0);

struct ArrivalLimitOptions {
  int step = 1;
  int replica = 0;      // coordinate of the primary one-sample-per-run estimator
  bool pooled = false;  // pool all replicas (variance-reduced, biased CI)
  double tv_threshold = 0.02;
  std::uint64_t bootstrap_seed = 0;
  int bootstrap_reps = 200;
};

// TV between the empirical arrival law and the analytic target per M;
// passes iff TV strictly decreases along the sweep and the final TV is
// below max(tv_threshold, 3 * bootstrap se).
StatReport arrival_limit_test(std::span<const Archive* const> archives, int node,
                              const CompoundPoissonLaw& target,
                              const ArrivalLimitOptions& options = {});

struct IndependenceOptions {
  int step = 1;
  int replica = 0;
  std::uint64_t bootstrap_seed = 0;
  int bootstrap_reps = 200;
};

// Joint-vs-product gap between the fragmented part and the arrivals at one
// (replica, node) coordinate across runs.
JointIndependenceReport endo_arrival_independence_test(
    const Archive& archive, int node, const IndependenceOptions& options = {});

// Flat rows "test,M,estimate,se,verdict" for external plotting.
void append_report_csv(const StatReport& report, std::ostream& out);

}  // namespace fiaplab
