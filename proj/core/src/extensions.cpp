#include "fiaplab/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fiaplab {

RandomStepFn RandomStepFn::constant_in_v(const StateFn& fn, int state_count) {
  RandomStepFn out;
  out.by_state.resize(state_count);
  for (int k = 0; k < state_count; ++k) {
    out.by_state[k].values = {fn(k)};
  }
  return out;
}

std::int64_t RandomStepFn::operator()(std::int64_t state, double v) const {
  if (by_state.empty()) throw std::invalid_argument("random step fn: empty table");
  const auto idx = static_cast<std::size_t>(
      std::min<std::int64_t>(state, static_cast<std::int64_t>(by_state.size()) - 1));
  const auto& slice = by_state[idx];
  std::size_t seg = 0;
  while (seg < slice.cuts.size() && v >= slice.cuts[seg]) ++seg;
  return slice.values[seg];
}

std::int64_t RandomStepFn::max_value() const {
  std::int64_t m = 0;
  for (const auto& slice : by_state) {
    for (auto v : slice.values) m = std::max(m, v);
  }
  return m;
}

void RandomStepFn::validate() const {
  if (by_state.empty()) throw std::invalid_argument("random step fn: empty table");
  for (const auto& slice : by_state) {
    if (slice.values.size() != slice.cuts.size() + 1) {
      throw std::invalid_argument("random step fn: need one value per v-segment");
    }
    for (std::size_t c = 0; c < slice.cuts.size(); ++c) {
      if (!(slice.cuts[c] > 0.0 && slice.cuts[c] < 1.0)) {
        throw std::invalid_argument("random step fn: cuts must lie in (0, 1)");
      }
      if (c > 0 && !(slice.cuts[c] > slice.cuts[c - 1])) {
        throw std::invalid_argument("random step fn: cuts must be ascending");
      }
    }
    for (auto v : slice.values) {
      if (v < 0) throw std::invalid_argument("random step fn: values must be >= 0");
    }
  }
}

void RandomizedInteractionSet::validate(int node_count) const {
  if (h.size() != static_cast<std::size_t>(node_count)) {
    throw std::invalid_argument("randomized interactions: matrix must be K x K");
  }
  for (int i = 0; i < node_count; ++i) {
    if (h[i].size() != static_cast<std::size_t>(node_count)) {
      throw std::invalid_argument("randomized interactions: matrix must be K x K");
    }
    for (int j = 0; j < node_count; ++j) {
      if (i == j) continue;
      h[i][j].validate();
      if (h[i][j].max_value() > bound) {
        throw std::invalid_argument("randomized interactions: value exceeds the bound at h[" +
                                    std::to_string(i) + "][" + std::to_string(j) + "]");
      }
    }
  }
}

StepOutcome step_with_random_interactions(const FiapSpec& spec,
                                          const RandomizedInteractionSet& interactions,
                                          const NetworkState& state,
                                          std::span<const double> u,
                                          std::span<const double> v) {
  const int k = spec.node_count;
  interactions.validate(k);
  if (state.x.size() != static_cast<std::size_t>(k) ||
      u.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("step_with_random_interactions: dimension mismatch");
  }
  if (v.size() != static_cast<std::size_t>(k) * k) {
    throw std::invalid_argument(
        "step_with_random_interactions: need one v-draw per (receiver, sender) pair");
  }

  StepOutcome out;
  out.activated.resize(k);
  out.endogenous.resize(k);
  out.arrivals.assign(k, 0);
  for (int i = 0; i < k; ++i) {
    const bool on = u[i] < spec.sigma[i](state.x[i]);
    out.activated[i] = on ? 1 : 0;
    out.endogenous[i] = on ? spec.frag_on[i](state.x[i]) : spec.frag_off[i](state.x[i]);
  }
  for (int j = 0; j < k; ++j) {
    if (!out.activated[j]) continue;
    for (int i = 0; i < k; ++i) {
      if (i == j) continue;
      out.arrivals[i] += interactions.h[i][j](state.x[j], v[i * k + j]);
    }
  }
  out.next_state.x.resize(k);
  for (int i = 0; i < k; ++i) out.next_state.x[i] = out.endogenous[i] + out.arrivals[i];
  out.next_state.step = state.step + 1;
  return out;
}

namespace {

std::int64_t sample_poisson(double rate, RandomStream& stream) {
  // Inverse-CDF search; fine at the desk-scale rates used here.
  const double u = stream.uniform();
  double p = std::exp(-rate);
  double cum = p;
  std::int64_t n = 0;
  while (u >= cum && n < 100000) {
    ++n;
    p *= rate / static_cast<double>(n);
    cum += p;
  }
  return n;
}

}  // namespace

ExogenousStepOutcome step_with_exogenous(const FiapSpec& spec, const ExogenousIO& io,
                                         const NetworkState& state,
                                         std::span<const double> u,
                                         RandomStream& exogenous_stream) {
  const int k = spec.node_count;
  if (io.inputs.size() != static_cast<std::size_t>(k) ||
      io.output.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("step_with_exogenous: need one input law and output map per node");
  }
  ExogenousStepOutcome out;
  out.base = step_network(spec, state, u);
  out.exogenous_in.resize(k);
  out.exogenous_out.resize(k);
  for (int i = 0; i < k; ++i) {
    const auto& law = io.inputs[i];
    out.exogenous_in[i] = law.poisson ? sample_poisson(law.rate, exogenous_stream)
                                      : law.pmf.sample(exogenous_stream.uniform());
    out.base.next_state.x[i] += out.exogenous_in[i];
    out.exogenous_out[i] = out.base.activated[i] ? io.output[i](state.x[i]) : 0;
  }
  return out;
}

void PartitionSpec::validate() const {
  validate_spec(base);
  std::vector<int> seen(base.node_count, 0);
  if (sets.empty()) throw std::invalid_argument("partition: no sets");
  for (const auto& set : sets) {
    if (set.empty()) throw std::invalid_argument("partition: empty set");
    for (int node : set) {
      if (node < 0 || node >= base.node_count) {
        throw std::invalid_argument("partition: node index out of range");
      }
      if (seen[node]++) {
        throw std::invalid_argument("partition: node " + std::to_string(node) +
                                    " appears twice");
      }
    }
  }
  for (int node = 0; node < base.node_count; ++node) {
    if (!seen[node]) {
      throw std::invalid_argument("partition: node " + std::to_string(node) + " not covered");
    }
  }
}

VectorStepOutcome step_vector_partition_rmf(const PartitionSpec& pspec,
                                            const ReplicaSystemState& state,
                                            RandomStream& activation,
                                            RandomStream& routing) {
  pspec.validate();
  const auto& spec = pspec.base;
  const int m_count = state.replica_count;
  const int k = state.node_count;
  if (m_count < 2) {
    throw std::invalid_argument("step_vector_partition_rmf: need at least two replicas");
  }
  if (k != spec.node_count ||
      state.x.size() != static_cast<std::size_t>(m_count) * k) {
    throw std::invalid_argument("step_vector_partition_rmf: state does not match spec");
  }
  const auto& sets = pspec.sets;
  const int set_count = static_cast<int>(sets.size());

  VectorStepOutcome out;
  out.exo_arrivals.assign(static_cast<std::size_t>(m_count) * k, 0);
  out.endogenous.resize(static_cast<std::size_t>(m_count) * k);
  out.activated.assign(static_cast<std::size_t>(m_count) * k, 0);
  out.u_draws.resize(static_cast<std::size_t>(m_count) * k);

  for (int m = 0; m < m_count; ++m) {
    for (int i = 0; i < k; ++i) {
      const auto idx = static_cast<std::size_t>(m) * k + i;
      const double u = activation.uniform();
      out.u_draws[idx] = u;
      out.activated[idx] = u < spec.sigma[i](state.at(m, i)) ? 1 : 0;
    }
  }

  // Intra-set dynamics: fragmentation plus deliveries between nodes of the
  // same set and replica.
  for (int m = 0; m < m_count; ++m) {
    for (const auto& set : sets) {
      for (int i : set) {
        const auto idx = static_cast<std::size_t>(m) * k + i;
        const auto xi = state.at(m, i);
        std::int64_t value = out.activated[idx] ? spec.frag_on[i](xi) : spec.frag_off[i](xi);
        for (int j : set) {
          if (j == i) continue;
          if (out.activated[static_cast<std::size_t>(m) * k + j]) {
            value += spec.h(i, j)(state.at(m, j));
          }
        }
        out.endogenous[idx] = value;
      }
    }
  }

  // Cross-set outputs: one routing draw per (replica, source set, dest set),
  // consumed regardless of the emitted amounts; the whole per-type vector
  // lands in the drawn replica.
  for (int m = 0; m < m_count; ++m) {
    for (int p = 0; p < set_count; ++p) {
      const auto& source = sets[p];
      for (int q = 0; q < set_count; ++q) {
        if (q == p) continue;
        const auto& dest_set = sets[q];
        const int dest = sample_routing(m_count, m, routing);

        std::vector<std::int64_t> amounts(dest_set.size(), 0);
        bool any = false;
        for (std::size_t kk = 0; kk < dest_set.size(); ++kk) {
          const int type = dest_set[kk];
          std::int64_t d = 0;
          for (std::size_t si = 0; si < source.size(); ++si) {
            const int i = source[si];
            if (!out.activated[static_cast<std::size_t>(m) * k + i]) continue;
            const int weight_node =
                (pspec.pair_output_uses_first_weights && source.size() == 2) ? source[0] : i;
            d += spec.h(type, weight_node)(state.at(m, i));
          }
          amounts[kk] = d;
          any = any || d != 0;
        }
        for (std::size_t kk = 0; kk < dest_set.size(); ++kk) {
          out.exo_arrivals[static_cast<std::size_t>(dest) * k + dest_set[kk]] += amounts[kk];
        }
        if (any) out.routings.push_back({m, p, q, dest, std::move(amounts)});
      }
    }
  }

  out.next.replica_count = m_count;
  out.next.node_count = k;
  out.next.step = state.step + 1;
  out.next.x.resize(static_cast<std::size_t>(m_count) * k);
  for (std::size_t idx = 0; idx < out.next.x.size(); ++idx) {
    out.next.x[idx] = out.endogenous[idx] + out.exo_arrivals[idx];
  }
  return out;
}

void run_vector_campaign(const PartitionSpec& pspec, int replica_count, int runs,
                         int horizon, std::span<const Pmf> initial, std::uint64_t seed,
                         const std::function<void(int run, const VectorStepOutcome&)>& sink) {
  pspec.validate();
  const int k = pspec.base.node_count;
  if (initial.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("run_vector_campaign: need one initial law per node");
  }
  if (replica_count < 2 || runs < 1 || horizon < 1) {
    throw std::invalid_argument("run_vector_campaign: bad campaign shape");
  }
  for (int run = 0; run < runs; ++run) {
    ReplicaSystemState state;
    state.replica_count = replica_count;
    state.node_count = k;
    state.x.resize(static_cast<std::size_t>(replica_count) * k);
    auto init_stream =
        derive_stream(seed, static_cast<std::uint32_t>(run), 0, StreamRole::initial);
    for (int m = 0; m < replica_count; ++m) {
      for (int i = 0; i < k; ++i) {
        state.at(m, i) = initial[i].sample(init_stream.uniform());
      }
    }
    for (int t = 0; t < horizon; ++t) {
      auto act = derive_stream(seed, static_cast<std::uint32_t>(run),
                               static_cast<std::uint32_t>(t), StreamRole::activation);
      auto rout = derive_stream(seed, static_cast<std::uint32_t>(run),
                                static_cast<std::uint32_t>(t), StreamRole::routing);
      auto outcome = step_vector_partition_rmf(pspec, state, act, rout);
      sink(run, outcome);
      state = std::move(outcome.next);
    }
  }
}

std::vector<StepOutcome> simulate_inhomogeneous(std::span<const FiapSpec> specs,
                                                const NetworkState& init,
                                                std::uint64_t seed) {
  if (specs.empty()) throw std::invalid_argument("simulate_inhomogeneous: no specs");
  const int k = specs[0].node_count;
  for (const auto& spec : specs) {
    validate_spec(spec);
    if (spec.node_count != k) {
      throw std::invalid_argument("simulate_inhomogeneous: all specs must share K");
    }
  }
  std::vector<StepOutcome> path;
  path.reserve(specs.size());
  NetworkState state = init;
  std::vector<double> u(k);
  for (std::size_t t = 0; t < specs.size(); ++t) {
    auto stream = derive_stream(seed, 0, static_cast<std::uint32_t>(state.step),
                                StreamRole::activation);
    for (auto& value : u) value = stream.uniform();
    path.push_back(step_network(specs[t], state, u));
    state = path.back().next_state;
  }
  return path;
}

}  // namespace fiaplab
