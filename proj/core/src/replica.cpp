#include "fiaplab/replica.hpp"

#include <stdexcept>

namespace fiaplab {

std::int64_t ReplicaSystemState::total_mass() const {
  std::int64_t total = 0;
  for (auto v : x) total += v;
  return total;
}

ReplicaStepOutcome step_replica_system(const FiapSpec& spec, const ReplicaSystemState& state,
                                       RandomStream& activation, RandomStream& routing) {
  const int m_count = state.replica_count;
  const int k = state.node_count;
  if (m_count < 2) {
    throw std::invalid_argument("step_replica_system: need at least two replicas");
  }
  if (k != spec.node_count) {
    throw std::invalid_argument("step_replica_system: state does not match spec");
  }
  if (state.x.size() != static_cast<std::size_t>(m_count) * k) {
    throw std::invalid_argument("step_replica_system: state size mismatch");
  }

  ReplicaStepOutcome out;
  out.tensor.replica_count = m_count;
  out.tensor.node_count = k;
  out.tensor.arrivals.assign(static_cast<std::size_t>(m_count) * k, 0);
  out.tensor.activated.assign(static_cast<std::size_t>(m_count) * k, 0);
  out.endogenous.resize(static_cast<std::size_t>(m_count) * k);
  out.u_draws.resize(static_cast<std::size_t>(m_count) * k);

  for (int m = 0; m < m_count; ++m) {
    for (int j = 0; j < k; ++j) {
      const auto idx = static_cast<std::size_t>(m) * k + j;
      const double u = activation.uniform();
      out.u_draws[idx] = u;
      const auto xmj = state.at(m, j);
      const bool on = u < spec.sigma[j](xmj);
      out.tensor.activated[idx] = on ? 1 : 0;
      out.endogenous[idx] = on ? spec.frag_on[j](xmj) : spec.frag_off[j](xmj);
    }
  }

  // Routing draws are consumed for every (source, destination) pair so the
  // stream position never depends on the activation pattern.
  for (int m = 0; m < m_count; ++m) {
    for (int j = 0; j < k; ++j) {
      const auto idx = static_cast<std::size_t>(m) * k + j;
      const bool on = out.tensor.activated[idx] != 0;
      for (int i = 0; i < k; ++i) {
        if (i == j) continue;
        const int dest = sample_routing(m_count, m, routing);
        if (!on) continue;
        const std::int64_t amount = spec.h(i, j)(state.at(m, j));
        out.tensor.arrivals[static_cast<std::size_t>(dest) * k + i] += amount;
        out.tensor.routings.push_back({m, j, i, dest, amount});
      }
    }
  }

  out.next.replica_count = m_count;
  out.next.node_count = k;
  out.next.step = state.step + 1;
  out.next.x.resize(static_cast<std::size_t>(m_count) * k);
  for (std::size_t idx = 0; idx < out.next.x.size(); ++idx) {
    out.next.x[idx] = out.endogenous[idx] + out.tensor.arrivals[idx];
  }
  return out;
}

}  // namespace fiaplab
