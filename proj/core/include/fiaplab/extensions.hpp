#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fiaplab/fiap.hpp"
#include "fiaplab/philox.hpp"
#include "fiaplab/pmf.hpp"
#include "fiaplab/replica.hpp"

namespace fiaplab {

// Randomized interaction map h(state, v): piecewise constant in the
// auxiliary uniform v, tabulated in state with last-row continuation.
struct RandomStepFn {
  struct Slice {
    std::vector<double> cuts;          // ascending thresholds in (0, 1)
    std::vector<std::int64_t> values;  // one per v-segment, cuts.size() + 1
  };
  std::vector<Slice> by_state;

  // Embeds a deterministic map as constant-in-v slices on {0..state_count-1}.
  static RandomStepFn constant_in_v(const StateFn& fn, int state_count);

  std::int64_t operator()(std::int64_t state, double v) const;
  std::int64_t max_value() const;
  void validate() const;
};

struct RandomizedInteractionSet {
  std::vector<std::vector<RandomStepFn>> h;  // [receiver][sender]
  std::int64_t bound = 0;

  // Throws if shapes do not match the node count or any value exceeds the
  // declared bound.
  void validate(int node_count) const;
};

// step_network with deliveries h[i][j](x[j], v[i * K + j]); v holds one
// fresh uniform per ordered (receiver, sender) pair for this step.
StepOutcome step_with_random_interactions(const FiapSpec& spec,
                                          const RandomizedInteractionSet& interactions,
                                          const NetworkState& state,
                                          std::span<const double> u,
                                          std::span<const double> v);

// Exogenous input laws and output maps. Inputs are sampled independently of
// everything else; outputs are emitted on activation and not fed back.
struct ExogenousIO {
  struct InputLaw {
    bool poisson = false;
    double rate = 0.0;       // Poisson option
    Pmf pmf = Pmf::delta(0); // otherwise
  };
  std::vector<InputLaw> inputs;  // per node
  std::vector<StateFn> output;   // h_o per node
};

struct ExogenousStepOutcome {
  StepOutcome base;                         // next state includes the inputs
  std::vector<std::int64_t> exogenous_in;   // B per node
  std::vector<std::int64_t> exogenous_out;  // D per node
};

ExogenousStepOutcome step_with_exogenous(const FiapSpec& spec, const ExogenousIO& io,
                                         const NetworkState& state,
                                         std::span<const double> u,
                                         RandomStream& exogenous_stream);

// A network whose nodes are the sets of a partition of {0..K-1}. Intra-set
// interactions stay local; what crosses set boundaries travels as exogenous
// vectors between replicas.
struct PartitionSpec {
  FiapSpec base;
  std::vector<std::vector<int>> sets;
  // Printed variant of the two-node output formula: the second member's
  // contribution uses the first member's weight map.
  bool pair_output_uses_first_weights = false;

  void validate() const;  // sets must disjointly cover {0..K-1}
};

struct VectorRouting {
  int source_replica;
  int source_set;
  int dest_set;
  int dest_replica;
  std::vector<std::int64_t> amounts;  // one per node of the destination set
};

struct VectorStepOutcome {
  ReplicaSystemState next;
  std::vector<std::int64_t> exo_arrivals;  // M x K received exogenous units
  std::vector<std::int64_t> endogenous;    // M x K state after intra-set dynamics
  std::vector<std::uint8_t> activated;     // M x K
  std::vector<double> u_draws;             // M x K
  std::vector<VectorRouting> routings;
};

// One step of the partitioned replica dynamics: activation uniforms in
// (replica, node) row-major order; for every (replica, source set, dest
// set) triple in ascending order one routing draw, consumed whether or not
// anything was emitted; the whole output vector of a triple lands in the
// single drawn replica.
VectorStepOutcome step_vector_partition_rmf(const PartitionSpec& pspec,
                                            const ReplicaSystemState& state,
                                            RandomStream& activation,
                                            RandomStream& routing);

// Applies specs[t] at step t; all specs must share the node count.
// Uniforms come from the same streams as simulate_trajectory.
std::vector<StepOutcome> simulate_inhomogeneous(std::span<const FiapSpec> specs,
                                                const NetworkState& init,
                                                std::uint64_t seed);

// Runs R independent campaigns of the partitioned dynamics with i.i.d.
// initial states (same stream derivation as the standard engine) and hands
// every step outcome to the sink. Deterministic given the seed.
void run_vector_campaign(const PartitionSpec& pspec, int replica_count, int runs,
                         int horizon, std::span<const Pmf> initial, std::uint64_t seed,
                         const std::function<void(int run, const VectorStepOutcome&)>& sink);

}  // namespace fiaplab
