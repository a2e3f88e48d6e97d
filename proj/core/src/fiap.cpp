#include "fiaplab/fiap.hpp"

#include <stdexcept>

#include "fiaplab/philox.hpp"

namespace fiaplab {

bool FiapSpec::symmetric() const {
  for (int i = 1; i < node_count; ++i) {
    if (sigma[i] != sigma[0] || frag_on[i] != frag_on[0] || frag_off[i] != frag_off[0]) {
      return false;
    }
  }
  const StateFn* ref = nullptr;
  for (int i = 0; i < node_count; ++i) {
    for (int j = 0; j < node_count; ++j) {
      if (i == j) continue;
      if (ref == nullptr) {
        ref = &interaction[i][j];
      } else if (interaction[i][j] != *ref) {
        return false;
      }
    }
  }
  return true;
}

const FiapSpec& validate_spec(const FiapSpec& spec) {
  if (spec.node_count < 2) {
    throw std::invalid_argument("spec: node count must be at least 2");
  }
  const auto k = static_cast<std::size_t>(spec.node_count);
  if (spec.sigma.size() != k || spec.frag_on.size() != k || spec.frag_off.size() != k) {
    throw std::invalid_argument("spec: sigma/g1/g2 must have one entry per node");
  }
  for (int i = 0; i < spec.node_count; ++i) {
    try {
      spec.sigma[i].validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("node " + std::to_string(i) + ": " + e.what());
    }
  }
  if (spec.interaction.size() != k) {
    throw std::invalid_argument("spec: interaction matrix must be K x K");
  }
  for (int i = 0; i < spec.node_count; ++i) {
    if (spec.interaction[i].size() != k) {
      throw std::invalid_argument("spec: interaction matrix must be K x K");
    }
    for (int j = 0; j < spec.node_count; ++j) {
      if (i == j) continue;
      const auto b = spec.interaction[i][j].bound();
      if (!b.has_value()) {
        throw std::invalid_argument(
            "spec: interaction h[" + std::to_string(i) + "][" + std::to_string(j) +
            "] (" + spec.interaction[i][j].describe() + ") is unbounded");
      }
      if (*b > spec.interaction_bound) {
        throw std::invalid_argument(
            "spec: interaction h[" + std::to_string(i) + "][" + std::to_string(j) +
            "] exceeds the declared bound " + std::to_string(spec.interaction_bound));
      }
    }
  }
  return spec;
}

StepOutcome step_network(const FiapSpec& spec, const NetworkState& state,
                         std::span<const double> u) {
  const int k = spec.node_count;
  if (state.x.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("step_network: state size does not match node count");
  }
  if (u.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("step_network: need one uniform per node");
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
      out.arrivals[i] += spec.h(i, j)(state.x[j]);
    }
  }

  out.next_state.x.resize(k);
  for (int i = 0; i < k; ++i) {
    out.next_state.x[i] = out.endogenous[i] + out.arrivals[i];
  }
  out.next_state.step = state.step + 1;
  return out;
}

namespace {

std::vector<std::vector<StateFn>> uniform_off_diagonal(int k, const StateFn& fn) {
  std::vector<std::vector<StateFn>> h(k, std::vector<StateFn>(k, StateFn::zero()));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i != j) h[i][j] = fn;
    }
  }
  return h;
}

}  // namespace

FiapSpec builtin_instance(std::string_view name, const InstanceParams& params) {
  if (params.node_count < 2) {
    throw std::invalid_argument("instance: node count must be at least 2");
  }
  if (params.sigma.empty()) {
    throw std::invalid_argument("instance: missing activation table");
  }
  const int k = params.node_count;

  FiapSpec spec;
  spec.node_count = k;
  spec.sigma.assign(k, SigmaTable(params.sigma));

  if (name == "galves-locherbach") {
    if (params.weights.size() != static_cast<std::size_t>(k)) {
      throw std::invalid_argument("galves-locherbach: missing K x K weight matrix");
    }
    spec.frag_on.assign(k, StateFn::zero());
    spec.frag_off.assign(k, StateFn::identity());
    spec.interaction.assign(k, std::vector<StateFn>(k, StateFn::zero()));
    std::int64_t max_w = 0;
    for (int i = 0; i < k; ++i) {
      if (params.weights[i].size() != static_cast<std::size_t>(k)) {
        throw std::invalid_argument("galves-locherbach: weight matrix must be K x K");
      }
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        spec.interaction[i][j] = StateFn::constant(params.weights[i][j]);
        max_w = std::max(max_w, params.weights[i][j]);
      }
    }
    spec.interaction_bound = max_w;
  } else if (name == "gordon-newell") {
    spec.frag_on.assign(k, StateFn::decrement());
    spec.frag_off.assign(k, StateFn::identity());
    spec.interaction.assign(k, std::vector<StateFn>(k, StateFn::zero()));
    for (int j = 0; j < k; ++j) {
      spec.interaction[(j + 1) % k][j] = StateFn::constant(1);
    }
    spec.interaction_bound = 1;
  } else if (name == "tcp-aimd") {
    spec.frag_on.assign(k, StateFn::half());
    spec.frag_off.assign(k, StateFn::increment());
    spec.interaction = uniform_off_diagonal(k, StateFn::constant(1));
    spec.interaction_bound = 1;
  } else if (name == "custom-table") {
    if (params.frag_on_table.empty() || params.frag_off_table.empty() ||
        params.interaction_table.empty()) {
      throw std::invalid_argument("custom-table: missing g1/g2/h tables");
    }
    spec.frag_on.assign(k, StateFn::table(params.frag_on_table));
    spec.frag_off.assign(k, StateFn::table(params.frag_off_table));
    const auto h = StateFn::table(params.interaction_table);
    spec.interaction = uniform_off_diagonal(k, h);
    spec.interaction_bound = *h.bound();
  } else {
    throw std::invalid_argument("unknown instance: " + std::string(name));
  }

  validate_spec(spec);
  return spec;
}

std::vector<std::string> builtin_instance_names() {
  return {"galves-locherbach", "gordon-newell", "tcp-aimd", "custom-table"};
}

std::vector<StepOutcome> simulate_trajectory(const FiapSpec& spec, const NetworkState& init,
                                             int horizon, std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("simulate_trajectory: horizon must be >= 1");
  std::vector<StepOutcome> path;
  path.reserve(horizon);
  NetworkState state = init;
  std::vector<double> u(spec.node_count);
  for (int t = 0; t < horizon; ++t) {
    auto stream = derive_stream(seed, 0, static_cast<std::uint32_t>(state.step),
                                StreamRole::activation);
    for (auto& v : u) v = stream.uniform();
    path.push_back(step_network(spec, state, u));
    state = path.back().next_state;
  }
  return path;
}

}  // namespace fiaplab
