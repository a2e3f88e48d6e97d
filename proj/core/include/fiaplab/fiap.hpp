#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fiaplab/state_fn.hpp"

namespace fiaplab {

// A fragmentation-interaction-aggregation network: K nodes with integer
// states. At each step a node in state k activates with probability
// sigma(k); its state fragments to g1(k) on activation and g2(k) otherwise;
// an activation of node j delivers h[i][j](k) units to every other node i.
// Deliveries are aggregated additively onto the fragmented states.
struct FiapSpec {
  int node_count = 0;                            // K >= 2
  std::vector<SigmaTable> sigma;                 // per node
  std::vector<StateFn> frag_on;                  // g1, applied on activation
  std::vector<StateFn> frag_off;                 // g2, applied otherwise
  std::vector<std::vector<StateFn>> interaction; // h[receiver][sender], diagonal unused
  std::int64_t interaction_bound = 0;            // declared bound on every h value

  const StateFn& h(int receiver, int sender) const { return interaction[receiver][sender]; }

  // True when every node shares sigma/g1/g2 and all off-diagonal h agree.
  bool symmetric() const;
};

struct NetworkState {
  std::vector<std::int64_t> x;
  std::int64_t step = 0;
};

struct StepOutcome {
  NetworkState next_state;
  std::vector<std::uint8_t> activated;
  std::vector<std::int64_t> endogenous;  // fragmented part, before aggregation
  std::vector<std::int64_t> arrivals;
};

// Returns `spec` if it satisfies every model condition, otherwise throws
// std::invalid_argument naming the first violated one.
const FiapSpec& validate_spec(const FiapSpec& spec);

// One exact step of the single-network dynamics. u must hold K uniforms;
// node i activates iff u[i] < sigma_i(x[i]) (a tie counts as no activation).
StepOutcome step_network(const FiapSpec& spec, const NetworkState& state,
                         std::span<const double> u);

// Parameters for the named instances. `sigma` is shared by all nodes.
struct InstanceParams {
  int node_count = 0;
  std::vector<double> sigma;
  // galves-locherbach: synaptic weight matrix, weights[i][j] delivered to i
  // when j spikes.
  std::vector<std::vector<std::int64_t>> weights;
  // custom-table: shared tables for g1, g2 and the off-diagonal h.
  std::vector<std::int64_t> frag_on_table;
  std::vector<std::int64_t> frag_off_table;
  std::vector<std::int64_t> interaction_table;
};

// Instances: "galves-locherbach" (reset on spike, weighted deliveries),
// "gordon-newell" (unit transfer along a cycle), "tcp-aimd" (halve on
// activation, grow otherwise), "custom-table" (everything tabulated).
FiapSpec builtin_instance(std::string_view name, const InstanceParams& params);

std::vector<std::string> builtin_instance_names();

// Simulates `horizon` steps. Step t draws its K uniforms from
// derive_stream(seed, 0, init.step + t, StreamRole::activation), so a
// trajectory is a pure function of (spec, init, horizon, seed).
std::vector<StepOutcome> simulate_trajectory(const FiapSpec& spec, const NetworkState& init,
                                             int horizon, std::uint64_t seed);

}  // namespace fiaplab
