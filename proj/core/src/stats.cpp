#include "fiaplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "fiaplab/philox.hpp"

namespace fiaplab {

namespace {

double sample_mean(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  return m / static_cast<double>(xs.size());
}

// Unbiased sample variance.
double sample_variance(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size() - 1);
}

int manifest_m(const Archive& archive) {
  if (!archive.manifest.contains("M")) {
    throw std::invalid_argument("archive manifest does not carry the replica count M");
  }
  return archive.manifest["M"].get<int>();
}

void sort_report_rows(StatReport& report) {
  std::sort(report.rows.begin(), report.rows.end(),
            [](const StatRow& a, const StatRow& b) { return a.m < b.m; });
}

// Replica averages (1/M) sum_n f(...), one per run, from column records.
template <typename PerReplica>
std::vector<double> replica_averages(const Archive& archive, int node, int step, int m,
                                     ObservableKind kind, PerReplica&& f) {
  std::map<std::int32_t, std::pair<double, int>> by_run;
  for (const auto& r : archive.records) {
    if (r.step != step || r.node != node || r.kind != kind) continue;
    auto& [sum, count] = by_run[r.run];
    sum += f(r);
    ++count;
  }
  if (by_run.empty()) {
    throw std::invalid_argument("archive carries no node column for the requested test");
  }
  std::vector<double> averages;
  averages.reserve(by_run.size());
  for (const auto& [run, sc] : by_run) {
    if (sc.second != m) {
      throw std::invalid_argument("archive column is incomplete for run " +
                                  std::to_string(run));
    }
    averages.push_back(sc.first / static_cast<double>(m));
  }
  return averages;
}

// Shared decay verdicts: variance decreasing in M beyond the combined
// estimator noise, means within 3 se of their precision-weighted grand
// mean. The noise margin keeps the decay verdict from flipping on ties:
// a non-decaying sweep shows equal variances whose sample estimates fall
// in either order with probability one half.
void finish_decay_report(StatReport& report) {
  sort_report_rows(report);
  report.monotone_pass = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const double margin = 2.0 * (report.rows[i].se + report.rows[i - 1].se);
    if (!(report.rows[i].estimate < report.rows[i - 1].estimate - margin)) {
      report.monotone_pass = false;
    }
  }
  double wsum = 0.0, wtotal = 0.0;
  bool all_exact = true;
  for (const auto& row : report.rows) {
    if (row.mean_se > 0.0) {
      const double w = 1.0 / (row.mean_se * row.mean_se);
      wsum += w * row.mean;
      wtotal += w;
      all_exact = false;
    }
  }
  const double grand = all_exact ? report.rows.front().mean : wsum / wtotal;
  report.final_pass = true;
  for (auto& row : report.rows) {
    const bool stable = row.mean_se > 0.0 ? std::abs(row.mean - grand) <= 3.0 * row.mean_se
                                          : row.mean == grand;
    row.pass = stable;
    if (!stable) report.final_pass = false;
  }
}

}  // namespace

double EmpiricalPmf::frequency(std::int64_t value) const {
  if (value < 0 || value >= static_cast<std::int64_t>(counts.size())) return 0.0;
  return static_cast<double>(counts[value]) / static_cast<double>(sample_count);
}

Pmf EmpiricalPmf::to_pmf() const {
  std::vector<double> p(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) {
    p[v] = static_cast<double>(counts[v]) / static_cast<double>(sample_count);
  }
  return Pmf(std::move(p));
}

EmpiricalPmf empirical_pmf(std::span<const std::int64_t> samples, std::string source) {
  if (samples.empty()) throw std::invalid_argument("empirical_pmf: no samples");
  EmpiricalPmf pmf;
  pmf.sample_count = static_cast<std::int64_t>(samples.size());
  pmf.source = std::move(source);
  for (auto s : samples) {
    if (s < 0) throw std::invalid_argument("empirical_pmf: negative sample");
    if (s >= static_cast<std::int64_t>(pmf.counts.size())) pmf.counts.resize(s + 1, 0);
    ++pmf.counts[s];
  }
  return pmf;
}

std::vector<PgfPoint> empirical_pgf(std::span<const std::int64_t> samples,
                                    std::span<const double> z_grid) {
  if (samples.size() < 2) throw std::invalid_argument("empirical_pgf: need at least 2 samples");
  std::vector<PgfPoint> points;
  points.reserve(z_grid.size());
  const auto n = static_cast<double>(samples.size());
  for (double z : z_grid) {
    double sum = 0.0, sumsq = 0.0;
    for (auto s : samples) {
      const double t = std::pow(z, static_cast<double>(s));
      sum += t;
      sumsq += t * t;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
    points.push_back({z, mean, std::sqrt(var / n)});
  }
  return points;
}

double tv_distance(const Pmf& p, const Pmf& q) {
  const std::int64_t cut = std::max(p.max_support(), q.max_support());
  double acc = 0.0;
  for (std::int64_t k = 0; k <= cut; ++k) acc += std::abs(p(k) - q(k));
  acc += std::abs(p.tail() - q.tail());
  return 0.5 * acc;
}

double tv_to_target(std::span<const std::int64_t> samples, const Pmf& target,
                    std::int64_t cut) {
  if (samples.empty()) throw std::invalid_argument("tv_to_target: no samples");
  std::vector<std::int64_t> counts(cut + 1, 0);
  std::int64_t tail_count = 0;
  for (auto s : samples) {
    if (s > cut) {
      ++tail_count;
    } else {
      ++counts[s];
    }
  }
  const auto n = static_cast<double>(samples.size());
  double target_head = 0.0;
  double acc = 0.0;
  for (std::int64_t k = 0; k <= cut; ++k) {
    acc += std::abs(static_cast<double>(counts[k]) / n - target(k));
    target_head += target(k);
  }
  acc += std::abs(static_cast<double>(tail_count) / n - (1.0 - target_head));
  return 0.5 * acc;
}

CovarianceEstimate pai_covariance(
    std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
    std::span<const std::int64_t> member_set) {
  if (pairs.size() < 30) {
    throw std::invalid_argument("pai_covariance: need at least 30 pairs");
  }
  auto member = [&member_set](std::int64_t z) {
    return std::find(member_set.begin(), member_set.end(), z) != member_set.end() ? 1.0
                                                                                  : 0.0;
  };
  const auto n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [z1, z2] : pairs) {
    mx += member(z1);
    my += member(z2);
  }
  mx /= n;
  my /= n;
  double cov = 0.0, var_prod = 0.0;
  for (const auto& [z1, z2] : pairs) {
    const double d = (member(z1) - mx) * (member(z2) - my);
    cov += d;
    var_prod += d * d;
  }
  cov /= (n - 1.0);
  var_prod = std::max(0.0, var_prod / (n - 1.0) - cov * cov);
  const double se = std::sqrt(var_prod / n);
  return {cov, se, cov - 1.96 * se, cov + 1.96 * se};
}

JointIndependenceReport pai_joint_test(
    std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
    std::span<const double> u_grid, std::span<const double> v_grid,
    std::uint64_t bootstrap_seed, int bootstrap_reps) {
  const std::size_t n = pairs.size();
  if (n < 100) throw std::invalid_argument("pai_joint_test: need at least 100 pairs");
  if (bootstrap_reps < 2) {
    throw std::invalid_argument("pai_joint_test: need at least 2 bootstrap replicates");
  }

  // Precompute u^Z1 and v^Z2 per grid value.
  std::vector<std::vector<double>> pow_u(u_grid.size(), std::vector<double>(n));
  std::vector<std::vector<double>> pow_v(v_grid.size(), std::vector<double>(n));
  for (std::size_t gi = 0; gi < u_grid.size(); ++gi) {
    for (std::size_t s = 0; s < n; ++s) {
      pow_u[gi][s] = std::pow(u_grid[gi], static_cast<double>(pairs[s].first));
    }
  }
  for (std::size_t gj = 0; gj < v_grid.size(); ++gj) {
    for (std::size_t s = 0; s < n; ++s) {
      pow_v[gj][s] = std::pow(v_grid[gj], static_cast<double>(pairs[s].second));
    }
  }

  auto gap_for = [&](std::span<const std::size_t> idx, std::size_t gi, std::size_t gj) {
    double su = 0.0, sv = 0.0, suv = 0.0;
    for (auto s : idx) {
      su += pow_u[gi][s];
      sv += pow_v[gj][s];
      suv += pow_u[gi][s] * pow_v[gj][s];
    }
    const double dn = static_cast<double>(idx.size());
    return suv / dn - (su / dn) * (sv / dn);
  };

  std::vector<std::size_t> all(n);
  for (std::size_t s = 0; s < n; ++s) all[s] = s;

  JointIndependenceReport report;
  report.bootstrap_seed = bootstrap_seed;
  report.points.reserve(u_grid.size() * v_grid.size());
  for (std::size_t gi = 0; gi < u_grid.size(); ++gi) {
    for (std::size_t gj = 0; gj < v_grid.size(); ++gj) {
      report.points.push_back({u_grid[gi], v_grid[gj], gap_for(all, gi, gj), 0.0});
    }
  }

  // Seeded bootstrap over pair indices, shared across grid points.
  auto stream = derive_stream(bootstrap_seed, 0, 0, StreamRole::initial);
  std::vector<double> boot_sum(report.points.size(), 0.0);
  std::vector<double> boot_sumsq(report.points.size(), 0.0);
  std::vector<std::size_t> idx(n);
  for (int b = 0; b < bootstrap_reps; ++b) {
    for (std::size_t s = 0; s < n; ++s) idx[s] = stream.uniform_index(n);
    std::size_t point = 0;
    for (std::size_t gi = 0; gi < u_grid.size(); ++gi) {
      for (std::size_t gj = 0; gj < v_grid.size(); ++gj, ++point) {
        const double g = gap_for(idx, gi, gj);
        boot_sum[point] += g;
        boot_sumsq[point] += g * g;
      }
    }
  }
  for (std::size_t point = 0; point < report.points.size(); ++point) {
    const double m = boot_sum[point] / bootstrap_reps;
    const double var =
        std::max(0.0, boot_sumsq[point] / bootstrap_reps - m * m) *
        (static_cast<double>(bootstrap_reps) / std::max(1, bootstrap_reps - 1));
    report.points[point].se = std::sqrt(var);
  }

  report.max_gap = 0.0;
  report.within_three_se = true;
  for (const auto& pt : report.points) {
    if (std::abs(pt.gap) >= report.max_gap) {
      report.max_gap = std::abs(pt.gap);
      report.se_at_max = pt.se;
    }
    // Grid points with u = 1 or v = 1 have gap identically zero.
    if (pt.se > 0.0 && std::abs(pt.gap) >= 3.0 * pt.se) report.within_three_se = false;
    if (pt.se == 0.0 && pt.gap != 0.0) report.within_three_se = false;
  }
  return report;
}

double CompactFn::operator()(std::int64_t state) const {
  if (state < 0 || state >= static_cast<std::int64_t>(values.size())) return 0.0;
  return values[state];
}

double CompactFn2::operator()(std::int64_t state, double u) const {
  if (state < 0 || state >= static_cast<std::int64_t>(values.size())) return 0.0;
  std::size_t bin = 0;
  while (bin < u_edges.size() && u >= u_edges[bin]) ++bin;
  return values[state][bin];
}

StatReport tlln_check(std::span<const Archive* const> archives, const CompactFn& f,
                      int node, int step) {
  if (archives.size() < 2) {
    throw std::invalid_argument("tlln_check: decay verdicts need at least 2 M values");
  }
  StatReport report;
  report.test_name = "tlln";
  for (const Archive* archive : archives) {
    const int m = manifest_m(*archive);
    auto averages = replica_averages(*archive, node, step, m, ObservableKind::state,
                                     [&f](const Record& r) {
                                       return f(static_cast<std::int64_t>(r.value));
                                     });
    const double mean = sample_mean(averages);
    const double var = sample_variance(averages, mean);
    StatRow row;
    row.m = m;
    row.estimate = var;
    row.se = var * std::sqrt(2.0 / std::max<std::size_t>(1, averages.size() - 1));
    row.mean = mean;
    row.mean_se = std::sqrt(var / static_cast<double>(averages.size()));
    report.rows.push_back(row);
  }
  finish_decay_report(report);
  report.note = "variance of replica averages across runs; decay plus mean stability";
  return report;
}

StatReport randomized_tlln_check(std::span<const Archive* const> archives,
                                 const CompactFn2& f, int node, int state_step) {
  if (archives.size() < 2) {
    throw std::invalid_argument(
        "randomized_tlln_check: decay verdicts need at least 2 M values");
  }
  StatReport report;
  report.test_name = "randomized-tlln";
  for (const Archive* archive : archives) {
    const int m = manifest_m(*archive);
    // Zip the state column at state_step with the udraw column of the
    // transition out of it; both are written in replica order, so matching
    // positions refer to the same replica.
    std::map<std::int32_t, std::pair<std::vector<std::int64_t>, std::vector<double>>> by_run;
    for (const auto& r : archive->records) {
      if (r.node != node) continue;
      if (r.step == state_step && r.kind == ObservableKind::state) {
        by_run[r.run].first.push_back(static_cast<std::int64_t>(r.value));
      } else if (r.step == state_step + 1 && r.kind == ObservableKind::udraw) {
        by_run[r.run].second.push_back(r.value);
      }
    }
    if (by_run.empty()) {
      throw std::invalid_argument("archive carries no state/udraw columns for the test");
    }
    std::vector<double> averages;
    averages.reserve(by_run.size());
    for (const auto& [run, columns] : by_run) {
      const auto& [states, us] = columns;
      if (static_cast<int>(states.size()) != m || states.size() != us.size()) {
        throw std::invalid_argument("archive state/udraw columns are incomplete for run " +
                                    std::to_string(run));
      }
      double acc = 0.0;
      for (std::size_t i = 0; i < states.size(); ++i) acc += f(states[i], us[i]);
      averages.push_back(acc / static_cast<double>(m));
    }
    const double mean = sample_mean(averages);
    const double var = sample_variance(averages, mean);
    StatRow row;
    row.m = m;
    row.estimate = var;
    row.se = var * std::sqrt(2.0 / std::max<std::size_t>(1, averages.size() - 1));
    row.mean = mean;
    row.mean_se = std::sqrt(var / static_cast<double>(averages.size()));
    report.rows.push_back(row);
  }
  finish_decay_report(report);
  report.note = "variance of randomized replica averages across runs";
  return report;
}

StatReport arrival_limit_test(std::span<const Archive* const> archives, int node,
                              const CompoundPoissonLaw& target,
                              const ArrivalLimitOptions& options) {
  if (archives.empty()) throw std::invalid_argument("arrival_limit_test: no archives");

  // Truncate the analytic target at its 1 - 1e-6 quantile.
  const double jump_mean = target.jumps.mean();
  double jump_sq = 0.0;
  for (std::int64_t k = 0; k <= target.jumps.max_support(); ++k) {
    jump_sq += static_cast<double>(k) * static_cast<double>(k) * target.jumps(k);
  }
  const double mean = target.rate * jump_mean;
  const double sd = std::sqrt(std::max(1e-12, target.rate * jump_sq));
  const auto horizon = static_cast<std::int64_t>(std::ceil(mean + 20.0 * sd + 20.0));
  const Pmf target_pmf = compound_poisson_pmf(target, horizon);
  const std::int64_t cut = target_pmf.quantile_cut(1e-6);

  if (options.bootstrap_reps < 2) {
    throw std::invalid_argument("arrival_limit_test: need at least 2 bootstrap replicates");
  }

  StatReport report;
  report.test_name = options.pooled ? "arrival-limit (pooled)" : "arrival-limit";
  for (const Archive* archive : archives) {
    const int m = manifest_m(*archive);
    const auto samples = archive->select_int(
        options.step, options.pooled ? -1 : options.replica, node, ObservableKind::arrival);
    if (samples.empty()) {
      throw std::invalid_argument("archive carries no arrival records for the test");
    }
    const double tv = tv_to_target(samples, target_pmf, cut);

    // Seeded bootstrap over the sample for the TV standard error.
    auto stream = derive_stream(options.bootstrap_seed, static_cast<std::uint32_t>(m), 0,
                                StreamRole::initial);
    double bsum = 0.0, bsumsq = 0.0;
    std::vector<std::int64_t> resample(samples.size());
    for (int b = 0; b < options.bootstrap_reps; ++b) {
      for (auto& s : resample) s = samples[stream.uniform_index(samples.size())];
      const double btv = tv_to_target(resample, target_pmf, cut);
      bsum += btv;
      bsumsq += btv * btv;
    }
    const double bmean = bsum / options.bootstrap_reps;
    const double bvar = std::max(0.0, bsumsq / options.bootstrap_reps - bmean * bmean);

    StatRow row;
    row.m = m;
    row.estimate = tv;
    row.se = std::sqrt(bvar);
    report.rows.push_back(row);
  }
  sort_report_rows(report);

  report.monotone_pass = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (!(report.rows[i].estimate < report.rows[i - 1].estimate)) {
      report.monotone_pass = false;
    }
  }
  auto& last = report.rows.back();
  report.threshold = std::max(options.tv_threshold, 3.0 * last.se);
  report.final_pass = last.estimate < report.threshold;
  for (auto& row : report.rows) row.pass = row.estimate < report.threshold;
  report.note = "TV to the analytic limit law, support cut at the 1-1e-6 quantile, "
                "bootstrap seed " +
                std::to_string(options.bootstrap_seed);
  if (options.pooled) {
    report.note += "; pooled over replicas (variance-reduced, biased CI)";
  }
  return report;
}

JointIndependenceReport endo_arrival_independence_test(const Archive& archive, int node,
                                                       const IndependenceOptions& options) {
  const auto endo = archive.select_int(options.step, options.replica, node,
                                       ObservableKind::endogenous);
  const auto arr =
      archive.select_int(options.step, options.replica, node, ObservableKind::arrival);
  if (endo.empty() || endo.size() != arr.size()) {
    throw std::invalid_argument(
        "endo_arrival_independence_test: archive must record the fragmented part and the "
        "arrivals at the chosen coordinate");
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs(endo.size());
  for (std::size_t i = 0; i < endo.size(); ++i) pairs[i] = {endo[i], arr[i]};
  return pai_joint_test(pairs, kDefaultPgfGrid, kDefaultPgfGrid, options.bootstrap_seed,
                        options.bootstrap_reps);
}

nlohmann::json JointIndependenceReport::to_json() const {
  nlohmann::json j;
  j["max_gap"] = max_gap;
  j["se_at_max"] = se_at_max;
  j["within_three_se"] = within_three_se;
  j["bootstrap_seed"] = bootstrap_seed;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : points) {
    pts.push_back({{"u", pt.u}, {"v", pt.v}, {"gap", pt.gap}, {"se", pt.se}});
  }
  j["points"] = pts;
  return j;
}

nlohmann::json StatReport::to_json() const {
  nlohmann::json j;
  j["test"] = test_name;
  j["monotone_pass"] = monotone_pass;
  j["final_pass"] = final_pass;
  j["pass"] = overall();
  j["threshold"] = threshold;
  j["note"] = note;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    rows_json.push_back({{"M", row.m},
                         {"estimate", row.estimate},
                         {"se", row.se},
                         {"mean", row.mean},
                         {"mean_se", row.mean_se},
                         {"pass", row.pass}});
  }
  j["rows"] = rows_json;
  return j;
}

void append_report_csv(const StatReport& report, std::ostream& out) {
  for (const auto& row : report.rows) {
    out << report.test_name << ',' << row.m << ',' << row.estimate << ',' << row.se << ','
        << (row.pass ? "pass" : "fail") << '\n';
  }
  out << report.test_name << ",overall,,," << (report.overall() ? "pass" : "fail") << '\n';
}

}  // namespace fiaplab
