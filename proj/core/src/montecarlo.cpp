#include "fiaplab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "fiaplab/replica.hpp"
#include "fiaplab/spec_io.hpp"
#include "fiaplab/version.hpp"

namespace fiaplab {

namespace {

void validate_config(const RunConfig& config) {
  validate_spec(config.spec);
  if (config.replica_count < 2) {
    throw std::invalid_argument("run config: replica count must be at least 2");
  }
  if (config.horizon < 1) throw std::invalid_argument("run config: horizon must be >= 1");
  if (config.runs < 1) throw std::invalid_argument("run config: runs must be >= 1");
  if (config.workers < 1) throw std::invalid_argument("run config: workers must be >= 1");
  if (config.deterministic_init.has_value()) {
    if (config.deterministic_init->size() != static_cast<std::size_t>(config.spec.node_count)) {
      throw std::invalid_argument("run config: deterministic init needs one value per node");
    }
    for (auto v : *config.deterministic_init) {
      if (v < 0) throw std::invalid_argument("run config: initial states must be >= 0");
    }
  } else {
    if (config.initial.size() != static_cast<std::size_t>(config.spec.node_count)) {
      throw std::invalid_argument("run config: need one initial law per node");
    }
    for (const auto& pmf : config.initial) pmf.validate();
  }
  for (const auto& pair : config.record.pairs) {
    if (pair.replica < 0 || pair.replica >= config.replica_count || pair.node < 0 ||
        pair.node >= config.spec.node_count) {
      throw std::invalid_argument("run config: recorded pair out of range");
    }
  }
  for (int node : config.record.node_columns) {
    if (node < 0 || node >= config.spec.node_count) {
      throw std::invalid_argument("run config: recorded column out of range");
    }
  }
}

bool step_recorded(const RecordSpec& record, int step) {
  if (record.steps.empty()) return true;
  return std::find(record.steps.begin(), record.steps.end(), step) != record.steps.end();
}

}  // namespace

ReplicaSystemState sample_initial_state(const RunConfig& config, int run) {
  ReplicaSystemState state;
  state.replica_count = config.replica_count;
  state.node_count = config.spec.node_count;
  state.step = 0;
  state.x.resize(static_cast<std::size_t>(config.replica_count) * config.spec.node_count);

  if (config.deterministic_init.has_value()) {
    for (int m = 0; m < config.replica_count; ++m) {
      for (int i = 0; i < config.spec.node_count; ++i) {
        state.at(m, i) = (*config.deterministic_init)[i];
      }
    }
    return state;
  }

  auto stream = derive_stream(config.master_seed, static_cast<std::uint32_t>(run), 0,
                              StreamRole::initial);
  for (int m = 0; m < config.replica_count; ++m) {
    for (int i = 0; i < config.spec.node_count; ++i) {
      state.at(m, i) = config.initial[i].sample(stream.uniform());
    }
  }
  if (config.constant_replica_init) {
    for (int m = 1; m < config.replica_count; ++m) {
      for (int i = 0; i < config.spec.node_count; ++i) {
        state.at(m, i) = state.at(0, i);
      }
    }
  }
  return state;
}

namespace {

double observable_value(const ReplicaStepOutcome& outcome, int replica, int node,
                        ObservableKind kind) {
  const auto idx = static_cast<std::size_t>(replica) * outcome.next.node_count + node;
  switch (kind) {
    case ObservableKind::state:
      return static_cast<double>(outcome.next.x[idx]);
    case ObservableKind::arrival:
      return static_cast<double>(outcome.tensor.arrivals[idx]);
    case ObservableKind::activation:
      return outcome.tensor.activated[idx] ? 1.0 : 0.0;
    case ObservableKind::endogenous:
      return static_cast<double>(outcome.endogenous[idx]);
    case ObservableKind::udraw:
      return outcome.u_draws[idx];
  }
  return 0.0;
}

void record_outcome(const RunConfig& config, int run, int step,
                    const ReplicaStepOutcome& outcome, std::vector<Record>& records) {
  const auto& rec = config.record;
  for (const auto& pair : rec.pairs) {
    // a recorded column already carries every replica of that node
    if (std::find(rec.node_columns.begin(), rec.node_columns.end(), pair.node) !=
        rec.node_columns.end()) {
      continue;
    }
    for (auto kind : rec.kinds) {
      records.push_back({run, step, pair.replica, pair.node, kind,
                         observable_value(outcome, pair.replica, pair.node, kind)});
    }
  }
  for (int node : rec.node_columns) {
    for (auto kind : rec.kinds) {
      for (int m = 0; m < config.replica_count; ++m) {
        records.push_back(
            {run, step, m, node, kind, observable_value(outcome, m, node, kind)});
      }
    }
  }
}

void record_initial(const RunConfig& config, int run, const ReplicaSystemState& state,
                    std::vector<Record>& records) {
  const auto& rec = config.record;
  for (const auto& pair : rec.pairs) {
    if (std::find(rec.node_columns.begin(), rec.node_columns.end(), pair.node) !=
        rec.node_columns.end()) {
      continue;
    }
    records.push_back({run, 0, pair.replica, pair.node, ObservableKind::state,
                       static_cast<double>(state.at(pair.replica, pair.node))});
  }
  for (int node : rec.node_columns) {
    for (int m = 0; m < config.replica_count; ++m) {
      records.push_back({run, 0, m, node, ObservableKind::state,
                         static_cast<double>(state.at(m, node))});
    }
  }
}

std::vector<Record> execute_run(const RunConfig& config, int run) {
  std::vector<Record> records;
  auto state = sample_initial_state(config, run);
  if (config.record.record_step_zero) record_initial(config, run, state, records);
  for (int t = 0; t < config.horizon; ++t) {
    auto activation = derive_stream(config.master_seed, static_cast<std::uint32_t>(run),
                                    static_cast<std::uint32_t>(t), StreamRole::activation);
    auto routing = derive_stream(config.master_seed, static_cast<std::uint32_t>(run),
                                 static_cast<std::uint32_t>(t), StreamRole::routing);
    auto outcome = step_replica_system(config.spec, state, activation, routing);
    if (step_recorded(config.record, t + 1)) {
      record_outcome(config, run, t + 1, outcome, records);
    }
    state = std::move(outcome.next);
  }
  return records;
}

}  // namespace

Archive run_monte_carlo(const RunConfig& config) {
  validate_config(config);

  std::vector<std::vector<Record>> per_run(config.runs);
  const int workers = std::min(config.workers, config.runs);
  if (workers <= 1) {
    for (int run = 0; run < config.runs; ++run) per_run[run] = execute_run(config, run);
  } else {
    std::atomic<int> next_run{0};
    auto worker = [&]() {
      for (;;) {
        const int run = next_run.fetch_add(1);
        if (run >= config.runs) return;
        per_run[run] = execute_run(config, run);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Archive archive;
  archive.manifest = run_config_to_json(config);
  archive.manifest["version"] = kVersion;
  std::size_t total = 0;
  for (const auto& records : per_run) total += records.size();
  archive.records.reserve(total);
  for (auto& records : per_run) {
    archive.records.insert(archive.records.end(), records.begin(), records.end());
  }
  return archive;
}

}  // namespace fiaplab
