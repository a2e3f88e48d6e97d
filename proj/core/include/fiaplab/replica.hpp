#pragma once

#include <cstdint>
#include <vector>

#include "fiaplab/fiap.hpp"
#include "fiaplab/philox.hpp"

namespace fiaplab {

// States of M coupled replicas of a K-node network, row-major by replica.
struct ReplicaSystemState {
  int replica_count = 0;  // M >= 2
  int node_count = 0;     // K
  std::vector<std::int64_t> x;
  std::int64_t step = 0;

  std::int64_t& at(int replica, int node) { return x[replica * node_count + node]; }
  std::int64_t at(int replica, int node) const { return x[replica * node_count + node]; }
  std::int64_t total_mass() const;
};

struct RoutedDelivery {
  int source_replica;
  int source_node;
  int dest_node;
  int dest_replica;
  std::int64_t amount;
};

// Per-step arrivals and the routing decisions that produced them. Routing
// redistributes mass across replicas but never creates or destroys it:
// summing `arrivals` over replicas at a node recovers the emitted totals.
struct ArrivalTensor {
  int replica_count = 0;
  int node_count = 0;
  std::vector<std::int64_t> arrivals;    // M x K
  std::vector<std::uint8_t> activated;   // M x K
  std::vector<RoutedDelivery> routings;  // one entry per activated (source, dest node)

  std::int64_t arrival(int replica, int node) const {
    return arrivals[replica * node_count + node];
  }
  bool active(int replica, int node) const {
    return activated[replica * node_count + node] != 0;
  }
};

struct ReplicaStepOutcome {
  ReplicaSystemState next;
  ArrivalTensor tensor;
  std::vector<std::int64_t> endogenous;  // M x K fragmented parts
  std::vector<double> u_draws;           // M x K activation uniforms
};

// One step of the M-replica dynamics. Activation uniforms are drawn from
// `activation` in (replica, node) row-major order. Routing indices are
// drawn from `routing` for every source (m, j) in the same order and every
// destination node i != j in ascending order, one independent draw per
// destination, whether or not the source activated; an activated source j
// in replica m delivers h[i][j](x[m][j]) units to node i of the drawn
// replica.
ReplicaStepOutcome step_replica_system(const FiapSpec& spec, const ReplicaSystemState& state,
                                       RandomStream& activation, RandomStream& routing);

}  // namespace fiaplab
