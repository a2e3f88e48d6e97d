#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fiaplab/archive.hpp"
#include "fiaplab/fiap.hpp"
#include "fiaplab/pmf.hpp"
#include "fiaplab/replica.hpp"

namespace fiaplab {

struct PairObservable {
  int replica = 0;
  int node = 0;
};

// What a campaign records. Designated (replica, node) pairs get every kind
// listed; node columns record the kinds across all replicas (the memory
// heavyweight, used by replica-average statistics).
struct RecordSpec {
  std::vector<PairObservable> pairs;
  std::vector<int> node_columns;
  std::vector<ObservableKind> kinds = {ObservableKind::state, ObservableKind::arrival};
  bool record_step_zero = false;
  std::vector<int> steps;  // empty: record every step
};

struct RunConfig {
  FiapSpec spec;
  int replica_count = 0;  // M
  int horizon = 1;
  int runs = 1;  // R
  // Per-node initial laws, sampled i.i.d. across replicas.
  std::vector<Pmf> initial;
  // When set, every replica of node i starts at the given value instead.
  std::optional<std::vector<std::int64_t>> deterministic_init;
  // Diagnostic sabotage: sample replica 0 and copy it to every replica,
  // producing the degenerate coupling that replica-average tests must flag.
  bool constant_replica_init = false;
  std::uint64_t master_seed = 0;
  RecordSpec record;
  int workers = 1;
};

// Initial states for one run, drawn from derive_stream(seed, run, 0,
// StreamRole::initial) in (replica, node) row-major order.
ReplicaSystemState sample_initial_state(const RunConfig& config, int run);

// Executes R independent runs of `horizon` replica steps each and returns
// the recorded observables plus a manifest sufficient to reproduce them.
// The output is a pure function of the config: runs are scheduled across
// `workers` threads but every stream is derived from (master_seed, run,
// step, role), so the archive does not depend on the scheduling.
Archive run_monte_carlo(const RunConfig& config);

nlohmann::json run_config_to_json(const RunConfig& config);

}  // namespace fiaplab
