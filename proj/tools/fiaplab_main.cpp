// fiaplab command line tool: experiment orchestration around the core
// library. Subcommands: simulate, verify-ph, solve-rate, vector-ph,
// list-instances, validate. Exit codes: 0 success/pass, 1 verdict fail,
// 2 usage or configuration error.
//
// stdout carries machine-readable content only; progress and human
// summaries go to stderr. FIAPLAB_OUT overrides the output directory and
// FIAPLAB_WORKERS the worker count when the flags are absent.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fiaplab/analytics.hpp"
#include "fiaplab/counting_model.hpp"
#include "fiaplab/extensions.hpp"
#include "fiaplab/montecarlo.hpp"
#include "fiaplab/spec_io.hpp"
#include "fiaplab/stats.hpp"
#include "fiaplab/version.hpp"

namespace {

using fiaplab::Archive;
using fiaplab::FiapSpec;
using fiaplab::Pmf;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitConfigError = 2;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

std::string resolve_out_dir(const CommonFlags& flags, const json& config,
                            const std::string& fallback) {
  if (!flags.out_dir.empty()) return flags.out_dir;
  if (const char* env = std::getenv("FIAPLAB_OUT")) return env;
  if (config.contains("out")) return config["out"].get<std::string>();
  return fallback;
}

int resolve_workers(const CommonFlags& flags, const json& config) {
  if (flags.workers.has_value()) return *flags.workers;
  if (config.contains("workers")) return config["workers"].get<int>();
  if (const char* env = std::getenv("FIAPLAB_WORKERS")) return std::atoi(env);
  return 1;
}

std::uint64_t resolve_seed(const CommonFlags& flags, const json& config) {
  if (flags.seed.has_value()) return *flags.seed;
  if (config.contains("seed")) return config["seed"].get<std::uint64_t>();
  throw std::invalid_argument("config: missing field 'seed' (or pass --seed)");
}

FiapSpec resolve_spec(const json& config) {
  if (config.contains("spec")) return fiaplab::fiap_spec_from_json(config["spec"]);
  if (config.contains("spec_file")) {
    return fiaplab::load_fiap_spec(config["spec_file"].get<std::string>());
  }
  if (config.contains("instance")) {
    const auto& inst = config["instance"];
    fiaplab::InstanceParams params;
    params.node_count = inst.value("K", 0);
    if (inst.contains("sigma")) params.sigma = inst["sigma"].get<std::vector<double>>();
    if (inst.contains("weights")) {
      params.weights = inst["weights"].get<std::vector<std::vector<std::int64_t>>>();
    }
    if (inst.contains("g1_table")) {
      params.frag_on_table = inst["g1_table"].get<std::vector<std::int64_t>>();
    }
    if (inst.contains("g2_table")) {
      params.frag_off_table = inst["g2_table"].get<std::vector<std::int64_t>>();
    }
    if (inst.contains("h_table")) {
      params.interaction_table = inst["h_table"].get<std::vector<std::int64_t>>();
    }
    return fiaplab::builtin_instance(inst.at("name").get<std::string>(), params);
  }
  throw std::invalid_argument("config: need one of 'spec', 'spec_file' or 'instance'");
}

std::vector<int> resolve_m_sweep(const json& config) {
  const auto& m = config.at("M");
  if (m.is_array()) return m.get<std::vector<int>>();
  return {m.get<int>()};
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out.good()) throw std::runtime_error("failed writing " + path.string());
}

json manifest_for(const json& config, std::uint64_t seed, int workers) {
  json manifest;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["workers"] = workers;
  manifest["version"] = fiaplab::kVersion;
  return manifest;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const CommonFlags& flags) {
  const auto config = fiaplab::load_json_file(flags.config_path);
  fiaplab::RunConfig run;
  run.spec = resolve_spec(config);
  const auto sweep = resolve_m_sweep(config);
  if (sweep.size() != 1) {
    throw std::invalid_argument("simulate: 'M' must be a single replica count");
  }
  run.replica_count = sweep[0];
  run.runs = config.value("R", 1);
  run.horizon = config.value("horizon", 1);
  run.master_seed = resolve_seed(flags, config);
  run.workers = resolve_workers(flags, config);
  if (config.contains("deterministic_init")) {
    run.deterministic_init =
        config["deterministic_init"].get<std::vector<std::int64_t>>();
  } else {
    run.initial = fiaplab::initial_laws_from_json(config.at("initial"),
                                                  run.spec.node_count);
  }
  run.constant_replica_init = config.value("sabotage_constant_replica", false);
  if (config.contains("record")) {
    run.record = fiaplab::record_spec_from_json(config["record"]);
  } else {
    run.record.pairs = {{0, 0}};
    run.record.kinds = {fiaplab::ObservableKind::state, fiaplab::ObservableKind::arrival,
                        fiaplab::ObservableKind::activation};
  }

  const auto out_dir = resolve_out_dir(flags, config, "fiaplab-out");
  std::cerr << "simulate: M=" << run.replica_count << " R=" << run.runs
            << " horizon=" << run.horizon << " -> " << out_dir << '\n';
  auto archive = fiaplab::run_monte_carlo(run);
  archive.manifest["cli_config"] = config;
  fiaplab::write_archive_files(archive, out_dir);
  std::cerr << "simulate: wrote " << archive.records.size() << " records\n";
  return kExitPass;
}

// ---------------------------------------------------------------------------
// verify-ph

struct ObservePoints {
  int node = 0;
  int replica = 0;
  int pair_node = 1;
  int pair_replica = 1;
};

ObservePoints resolve_observe(const json& config, int node_count) {
  ObservePoints obs;
  if (config.contains("observe")) {
    const auto& o = config["observe"];
    obs.node = o.value("node", 0);
    obs.replica = o.value("replica", 0);
    obs.pair_node = o.value("pair_node", (obs.node + 1) % node_count);
    obs.pair_replica = o.value("pair_replica", obs.replica + 1);
  } else {
    obs.pair_node = 1 % node_count;
  }
  return obs;
}

int cmd_verify_ph(const CommonFlags& flags) {
  const auto config = fiaplab::load_json_file(flags.config_path);
  const auto spec = resolve_spec(config);
  const auto sweep = resolve_m_sweep(config);
  if (sweep.size() < 2) {
    throw std::invalid_argument(
        "verify-ph: the M sweep needs at least 2 points (decay verdicts)");
  }
  const int runs = config.value("R", 2000);
  const auto seed = resolve_seed(flags, config);
  const int workers = resolve_workers(flags, config);
  const auto initial =
      fiaplab::initial_laws_from_json(config.at("initial"), spec.node_count);
  const auto obs = resolve_observe(config, spec.node_count);
  const double tv_threshold =
      config.contains("thresholds") ? config["thresholds"].value("tv", 0.02) : 0.02;

  // One campaign per M; the same master seed couples the sweep.
  std::vector<Archive> archives;
  archives.reserve(sweep.size());
  for (int m : sweep) {
    fiaplab::RunConfig run;
    run.spec = spec;
    run.replica_count = m;
    run.runs = runs;
    run.horizon = config.value("horizon", 1);
    run.initial = initial;
    run.master_seed = seed;
    run.workers = workers;
    run.constant_replica_init = config.value("sabotage_constant_replica", false);
    run.record.pairs = {{obs.replica, obs.node}, {obs.pair_replica, obs.pair_node}};
    run.record.node_columns = {obs.node};
    run.record.kinds = {fiaplab::ObservableKind::state, fiaplab::ObservableKind::arrival,
                        fiaplab::ObservableKind::endogenous};
    std::cerr << "verify-ph: campaign M=" << m << " R=" << runs << '\n';
    archives.push_back(fiaplab::run_monte_carlo(run));
  }
  std::vector<const Archive*> views;
  for (const auto& archive : archives) views.push_back(&archive);

  json report;
  report["tests"] = json::array();
  bool overall = true;

  // Arrival law convergence toward the analytic limit.
  const auto target = fiaplab::arrival_law_general(spec, initial, obs.node);
  fiaplab::ArrivalLimitOptions arrival_options;
  arrival_options.replica = obs.replica;
  arrival_options.tv_threshold = tv_threshold;
  arrival_options.bootstrap_seed = seed + 1;
  const auto arrival_report =
      fiaplab::arrival_limit_test(views, obs.node, target, arrival_options);
  report["tests"].push_back(arrival_report.to_json());
  overall = overall && arrival_report.overall();

  // Pairwise independence of the outputs at the two designated coordinates.
  const int m_low = sweep.front();
  const int m_high = sweep.back();
  auto pair_gap = [&](const Archive& archive) {
    const auto z1 = archive.select_int(1, obs.replica, obs.node,
                                       fiaplab::ObservableKind::state);
    const auto z2 = archive.select_int(1, obs.pair_replica, obs.pair_node,
                                       fiaplab::ObservableKind::state);
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs(z1.size());
    for (std::size_t i = 0; i < z1.size(); ++i) pairs[i] = {z1[i], z2[i]};
    return fiaplab::pai_joint_test(pairs, fiaplab::kDefaultPgfGrid,
                                   fiaplab::kDefaultPgfGrid, seed + 2);
  };
  const auto gap_low = pair_gap(archives.front());
  const auto gap_high = pair_gap(archives.back());
  const bool pai_pass = gap_high.within_three_se && gap_high.max_gap < gap_low.max_gap;
  {
    json pai;
    pai["test"] = "pai-outputs";
    pai["rows"] = json::array({json{{"M", m_low}, {"max_gap", gap_low.max_gap},
                                    {"se", gap_low.se_at_max}},
                               json{{"M", m_high}, {"max_gap", gap_high.max_gap},
                                    {"se", gap_high.se_at_max}}});
    pai["grid"] = fiaplab::kDefaultPgfGrid;
    pai["points"] = gap_high.to_json()["points"];
    pai["pass"] = pai_pass;
    report["tests"].push_back(pai);
    overall = overall && pai_pass;
  }

  // Replica-average decay of the empty-state indicator.
  const fiaplab::CompactFn indicator{{1.0}};
  const auto tlln_report = fiaplab::tlln_check(views, indicator, obs.node);
  report["tests"].push_back(tlln_report.to_json());
  overall = overall && tlln_report.overall();

  // Independence of the fragmented part and the arrivals at the largest M.
  fiaplab::IndependenceOptions endo_options;
  endo_options.replica = obs.replica;
  endo_options.bootstrap_seed = seed + 3;
  const auto endo_report =
      fiaplab::endo_arrival_independence_test(archives.back(), obs.node, endo_options);
  {
    json endo = endo_report.to_json();
    endo["test"] = "endo-arrival-independence";
    endo["pass"] = endo_report.within_three_se;
    report["tests"].push_back(endo);
    overall = overall && endo_report.within_three_se;
  }

  report["overall"] = overall ? "pass" : "fail";

  const auto out_dir = resolve_out_dir(flags, config, "fiaplab-verify");
  std::filesystem::create_directories(out_dir);
  write_json_file(manifest_for(config, seed, workers),
                  std::filesystem::path(out_dir) / "manifest.json");
  write_json_file(report, std::filesystem::path(out_dir) / "report.json");
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "report.csv", std::ios::binary);
    csv << "test,M,estimate,se,verdict\n";
    fiaplab::append_report_csv(arrival_report, csv);
    csv << "pai-outputs," << m_low << ',' << gap_low.max_gap << ',' << gap_low.se_at_max
        << ",\n";
    csv << "pai-outputs," << m_high << ',' << gap_high.max_gap << ','
        << gap_high.se_at_max << ',' << (pai_pass ? "pass" : "fail") << '\n';
    fiaplab::append_report_csv(tlln_report, csv);
    csv << "endo-arrival-independence," << m_high << ',' << endo_report.max_gap << ','
        << endo_report.se_at_max << ','
        << (endo_report.within_three_se ? "pass" : "fail") << '\n';
  }
  std::cerr << "verify-ph: overall " << (overall ? "PASS" : "FAIL") << ", report in "
            << out_dir << '\n';
  return overall ? kExitPass : kExitVerdictFail;
}

// ---------------------------------------------------------------------------
// solve-rate

int cmd_solve_rate(double base_rate, double weight, int nodes, bool with_ode,
                   double grid_step) {
  const auto params = fiaplab::solve_counting_rate(base_rate, weight, nodes);
  std::printf("b,mu,K,beta,a,c,residual\n");
  std::printf("%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.3g\n", params.base_rate, params.weight,
              params.node_count, params.rate, params.a, params.c, params.residual);
  std::cerr << "solve-rate: beta = " << params.rate << " (residual " << params.residual
            << ")\n";
  if (with_ode) {
    const auto sol = fiaplab::integrate_counting_ode(params, grid_step);
    std::printf("z,G\n");
    for (std::size_t i = 0; i < sol.z.size(); ++i) {
      std::printf("%.6f,%.12g\n", sol.z[i], sol.g[i]);
    }
    std::printf("g1_error,%.3g\n", sol.endpoint_error);
    std::cerr << "solve-rate: |G(1) - 1| = " << sol.endpoint_error << '\n';
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// vector-ph

int cmd_vector_ph(const CommonFlags& flags) {
  const auto config = fiaplab::load_json_file(flags.config_path);
  const auto spec = resolve_spec(config);
  const auto seed = resolve_seed(flags, config);
  const auto initial =
      fiaplab::initial_laws_from_json(config.at("initial"), spec.node_count);
  const int m = resolve_m_sweep(config).back();
  const int runs = config.value("R", 2000);
  const double tv_threshold =
      config.contains("thresholds") ? config["thresholds"].value("tv", 0.03) : 0.03;
  const double pgf_threshold =
      config.contains("thresholds") ? config["thresholds"].value("pgf", 0.02) : 0.02;

  fiaplab::PartitionSpec pspec;
  pspec.base = spec;
  if (config.contains("partition")) {
    pspec.sets = config["partition"].get<std::vector<std::vector<int>>>();
  } else if (config.contains("spec") && config["spec"].contains("partition")) {
    pspec.sets = config["spec"]["partition"].get<std::vector<std::vector<int>>>();
  } else {
    throw std::invalid_argument(
        "vector-ph: need a 'partition' section in the config or the spec");
  }
  pspec.validate();

  json report;
  bool overall = true;

  // Singleton-partition equivalence: the vector engine's exogenous arrivals
  // must match the standard engine's arrival law.
  {
    fiaplab::PartitionSpec singles;
    singles.base = spec;
    for (int i = 0; i < spec.node_count; ++i) singles.sets.push_back({i});
    std::vector<std::int64_t> vector_samples;
    fiaplab::run_vector_campaign(singles, m, runs, 1, initial, seed,
                                 [&](int, const fiaplab::VectorStepOutcome& out) {
                                   for (int mm = 0; mm < m; ++mm) {
                                     vector_samples.push_back(
                                         out.exo_arrivals[mm * spec.node_count]);
                                   }
                                 });
    fiaplab::RunConfig run;
    run.spec = spec;
    run.replica_count = m;
    run.runs = runs;
    run.initial = initial;
    run.master_seed = seed + 17;
    run.workers = resolve_workers(flags, config);
    run.record.node_columns = {0};
    run.record.kinds = {fiaplab::ObservableKind::arrival};
    const auto archive = fiaplab::run_monte_carlo(run);
    const auto standard_samples =
        archive.select_int(1, -1, 0, fiaplab::ObservableKind::arrival);

    const auto q = fiaplab::empirical_pmf(standard_samples).to_pmf();
    const auto p = fiaplab::empirical_pmf(vector_samples).to_pmf();
    const double tv = fiaplab::tv_distance(p, q);
    const bool pass = tv < tv_threshold;
    report["singleton_equivalence"] = {{"tv", tv}, {"threshold", tv_threshold},
                                       {"pass", pass}};
    overall = overall && pass;
  }

  // Exogenous-arrival PGF of the first partition set against the
  // multivariate formula, on a three-point grid per coordinate.
  {
    const auto& target_set = pspec.sets.front();
    std::vector<fiaplab::JointPmf> joints;
    for (const auto& set : pspec.sets) {
      std::vector<Pmf> marginals;
      for (int node : set) marginals.push_back(initial[node]);
      joints.push_back(fiaplab::JointPmf::product(marginals));
    }
    std::vector<std::vector<std::int64_t>> samples(target_set.size());
    fiaplab::run_vector_campaign(
        pspec, m, runs, 1, initial, seed + 29,
        [&](int, const fiaplab::VectorStepOutcome& out) {
          for (int mm = 0; mm < m; ++mm) {
            for (std::size_t c = 0; c < target_set.size(); ++c) {
              samples[c].push_back(out.exo_arrivals[mm * spec.node_count + target_set[c]]);
            }
          }
        });
    const double grid[] = {0.0, 0.5, 1.0};
    double max_diff = 0.0;
    const std::size_t n = samples[0].size();
    std::vector<double> z(spec.node_count, 1.0);
    std::vector<std::size_t> index(target_set.size(), 0);
    for (;;) {
      for (std::size_t c = 0; c < target_set.size(); ++c) {
        z[target_set[c]] = grid[index[c]];
      }
      double emp = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        double term = 1.0;
        for (std::size_t c = 0; c < target_set.size(); ++c) {
          term *= std::pow(z[target_set[c]], static_cast<double>(samples[c][s]));
        }
        emp += term;
      }
      emp /= static_cast<double>(n);
      const double formula =
          fiaplab::multivariate_vector_pgf(pspec.sets, joints, spec, 0, z);
      max_diff = std::max(max_diff, std::abs(emp - formula));
      std::size_t c = 0;
      for (; c < index.size(); ++c) {
        if (++index[c] < 3) break;
        index[c] = 0;
      }
      if (c == index.size()) break;
    }
    const bool pass = max_diff < pgf_threshold;
    report["pair_pgf"] = {{"max_diff", max_diff}, {"threshold", pgf_threshold},
                          {"grid", grid}, {"pass", pass}};
    overall = overall && pass;
  }

  report["overall"] = overall ? "pass" : "fail";
  const auto out_dir = resolve_out_dir(flags, config, "fiaplab-vector");
  std::filesystem::create_directories(out_dir);
  write_json_file(manifest_for(config, seed, resolve_workers(flags, config)),
                  std::filesystem::path(out_dir) / "manifest.json");
  write_json_file(report, std::filesystem::path(out_dir) / "report.json");
  std::cerr << "vector-ph: overall " << (overall ? "PASS" : "FAIL") << ", report in "
            << out_dir << '\n';
  return overall ? kExitPass : kExitVerdictFail;
}

// ---------------------------------------------------------------------------
// validate / list-instances

int cmd_validate(const CommonFlags& flags) {
  const auto config = fiaplab::load_json_file(flags.config_path);
  FiapSpec spec;
  if (config.contains("spec") || config.contains("spec_file") ||
      config.contains("instance")) {
    spec = resolve_spec(config);
  } else {
    spec = fiaplab::fiap_spec_from_json(config);
  }
  std::printf("valid: K=%d H_max=%lld symmetric=%s\n", spec.node_count,
              static_cast<long long>(spec.interaction_bound),
              spec.symmetric() ? "yes" : "no");
  return kExitPass;
}

int cmd_list_instances() {
  std::printf("galves-locherbach  reset on spike, weighted deliveries (needs weights)\n");
  std::printf("gordon-newell      unit transfer along a cycle of queues\n");
  std::printf("tcp-aimd           halve on activation, grow by one otherwise\n");
  std::printf("custom-table       g1/g2/h supplied as finite tables\n");
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiaplab: simulation and verification laboratory for "
               "fragmentation-interaction-aggregation networks and their replica "
               "mean-field limits"};
  app.set_version_flag("--version", fiaplab::kVersion);
  app.require_subcommand(1);

  CommonFlags flags;
  double base_rate = 0.0, weight = 0.0, grid_step = 1e-3;
  int nodes = 0;
  bool with_ode = false;

  auto add_common = [&flags](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", flags.config_path, "experiment config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "master seed override");
    cmd->add_option("--workers", flags.workers, "worker thread count");
  };

  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo campaign");
  add_common(simulate, true);
  auto* verify = app.add_subcommand("verify-ph", "run the limit-law verification suite");
  add_common(verify, true);
  auto* vector_ph =
      app.add_subcommand("vector-ph", "run the partitioned vector-state checks");
  add_common(vector_ph, true);
  auto* solve = app.add_subcommand("solve-rate", "solve the counting-model rate equation");
  solve->add_option("--base-rate", base_rate, "base rate b")->required();
  solve->add_option("--weight", weight, "synaptic weight mu")->required();
  solve->add_option("--nodes", nodes, "node count K")->required();
  solve->add_flag("--ode", with_ode, "integrate the generating-function ODE");
  solve->add_option("--grid-step", grid_step, "output grid step for --ode");
  auto* validate = app.add_subcommand("validate", "validate a spec or experiment config");
  add_common(validate, true);
  auto* list = app.add_subcommand("list-instances", "list the built-in model instances");
  (void)list;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(flags);
    if (verify->parsed()) return cmd_verify_ph(flags);
    if (vector_ph->parsed()) return cmd_vector_ph(flags);
    if (solve->parsed()) return cmd_solve_rate(base_rate, weight, nodes, with_ode, grid_step);
    if (validate->parsed()) return cmd_validate(flags);
    if (list->parsed()) return cmd_list_instances();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}
