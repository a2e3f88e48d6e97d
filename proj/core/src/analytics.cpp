#include "fiaplab/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace fiaplab {

namespace {

void check_node(const FiapSpec& spec, int node) {
  if (node < 0 || node >= spec.node_count) {
    throw std::invalid_argument("analytics: node index out of range");
  }
}

// E[z^(h(X) 1{U < sigma(X)})] for one sender with state law `pmf`.
double activation_jump_pgf(const Pmf& pmf, const SigmaTable& sigma, const StateFn& h,
                           double z) {
  double phi = 0.0;
  for (std::int64_t k = 0; k <= pmf.max_support(); ++k) {
    const double p = pmf(k);
    if (p == 0.0) continue;
    const double s = sigma(k);
    phi += p * (s * std::pow(z, static_cast<double>(h(k))) + (1.0 - s));
  }
  if (pmf.tail() > 0.0) {
    const std::int64_t t = pmf.max_support() + 1;
    const double s = sigma(t);
    phi += pmf.tail() * (s * std::pow(z, static_cast<double>(h(t))) + (1.0 - s));
  }
  return phi;
}

// Jump-size weights w[v] = P(X = k, h(k) = v, activation) for one sender.
void accumulate_jump_weights(const Pmf& pmf, const SigmaTable& sigma, const StateFn& h,
                             std::vector<double>& weights) {
  auto add = [&weights](std::int64_t v, double w) {
    if (w == 0.0) return;
    if (v >= static_cast<std::int64_t>(weights.size())) weights.resize(v + 1, 0.0);
    weights[v] += w;
  };
  for (std::int64_t k = 0; k <= pmf.max_support(); ++k) {
    add(h(k), pmf(k) * sigma(k));
  }
  if (pmf.tail() > 0.0) {
    const std::int64_t t = pmf.max_support() + 1;
    add(h(t), pmf.tail() * sigma(t));
  }
}

CompoundPoissonLaw law_from_jump_weights(std::vector<double> weights) {
  double rate = 0.0;
  for (double w : weights) rate += w;
  if (rate <= 0.0) return CompoundPoissonLaw{0.0, Pmf::delta(1)};
  for (double& w : weights) w /= rate;
  return CompoundPoissonLaw::make(rate, Pmf(std::move(weights)));
}

}  // namespace

double theta_from_pmf(const Pmf& pmf, const SigmaTable& sigma) {
  pmf.validate();
  double theta = 0.0;
  for (std::int64_t k = 0; k <= pmf.max_support(); ++k) theta += pmf(k) * sigma(k);
  theta += pmf.tail() * sigma(pmf.max_support() + 1);
  return theta;
}

CompoundPoissonLaw CompoundPoissonLaw::make(double raw_rate, const Pmf& raw_jumps) {
  if (!(raw_rate >= 0.0)) throw std::invalid_argument("compound law: rate must be >= 0");
  raw_jumps.validate();
  const double q0 = raw_jumps(0);
  const double rate = raw_rate * (1.0 - q0);
  if (rate == 0.0) return CompoundPoissonLaw{0.0, Pmf::delta(1)};
  std::vector<double> q(raw_jumps.probabilities());
  q[0] = 0.0;
  for (double& v : q) v /= (1.0 - q0);
  return CompoundPoissonLaw{rate, Pmf(std::move(q), raw_jumps.tail() / (1.0 - q0))};
}

CompoundPoissonLaw CompoundPoissonLaw::poisson(double rate) {
  return CompoundPoissonLaw::make(rate, Pmf::delta(1));
}

double CompoundPoissonLaw::pgf(double z) const {
  double phi = 0.0;
  for (std::int64_t k = 0; k <= jumps.max_support(); ++k) {
    phi += jumps(k) * std::pow(z, static_cast<double>(k));
  }
  return std::exp(rate * (phi - 1.0));
}

Pmf compound_poisson_pmf(const CompoundPoissonLaw& law, std::int64_t truncation) {
  if (truncation < 0) throw std::invalid_argument("compound pmf: truncation must be >= 0");
  std::vector<double> p(truncation + 1, 0.0);
  p[0] = std::exp(-law.rate);
  const std::int64_t jmax = law.jumps.max_support();
  for (std::int64_t n = 1; n <= truncation; ++n) {
    double acc = 0.0;
    for (std::int64_t k = 1; k <= std::min(n, jmax); ++k) {
      acc += static_cast<double>(k) * law.jumps(k) * p[n - k];
    }
    p[n] = law.rate * acc / static_cast<double>(n);
  }
  double mass = 0.0;
  for (double v : p) mass += v;
  return Pmf(std::move(p), std::max(0.0, 1.0 - mass));
}

double arrival_pgf_symmetric(const FiapSpec& spec, const Pmf& pmf, double z) {
  if (!spec.symmetric()) {
    throw std::invalid_argument("arrival_pgf_symmetric: spec is not symmetric");
  }
  pmf.validate();
  const double phi = activation_jump_pgf(pmf, spec.sigma[0], spec.h(0, 1), z);
  return std::exp((spec.node_count - 1) * (phi - 1.0));
}

double arrival_pgf_general(const FiapSpec& spec, std::span<const Pmf> pmfs, int node,
                           double z) {
  check_node(spec, node);
  if (pmfs.size() != static_cast<std::size_t>(spec.node_count)) {
    throw std::invalid_argument("arrival_pgf_general: need one pmf per node");
  }
  double expo = 0.0;
  for (int j = 0; j < spec.node_count; ++j) {
    if (j == node) continue;
    pmfs[j].validate();
    expo += 1.0 - activation_jump_pgf(pmfs[j], spec.sigma[j], spec.h(node, j), z);
  }
  return std::exp(-expo);
}

CompoundPoissonLaw arrival_law_symmetric(const FiapSpec& spec, const Pmf& pmf) {
  if (!spec.symmetric()) {
    throw std::invalid_argument("arrival_law_symmetric: spec is not symmetric");
  }
  pmf.validate();
  std::vector<double> weights;
  accumulate_jump_weights(pmf, spec.sigma[0], spec.h(0, 1), weights);
  for (double& w : weights) w *= (spec.node_count - 1);
  return law_from_jump_weights(std::move(weights));
}

CompoundPoissonLaw arrival_law_general(const FiapSpec& spec, std::span<const Pmf> pmfs,
                                       int node) {
  check_node(spec, node);
  if (pmfs.size() != static_cast<std::size_t>(spec.node_count)) {
    throw std::invalid_argument("arrival_law_general: need one pmf per node");
  }
  std::vector<double> weights;
  for (int j = 0; j < spec.node_count; ++j) {
    if (j == node) continue;
    pmfs[j].validate();
    accumulate_jump_weights(pmfs[j], spec.sigma[j], spec.h(node, j), weights);
  }
  return law_from_jump_weights(std::move(weights));
}

double weighted_gl_pgf(const std::vector<std::vector<std::int64_t>>& mu,
                       std::span<const double> thetas, int node, double z,
                       bool per_sender_theta) {
  const auto k = mu.size();
  if (thetas.size() != k) {
    throw std::invalid_argument("weighted_gl_pgf: need one theta per node");
  }
  if (node < 0 || static_cast<std::size_t>(node) >= k) {
    throw std::invalid_argument("weighted_gl_pgf: node index out of range");
  }
  double value = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (static_cast<int>(j) == node) continue;
    if (mu[node].size() != k) {
      throw std::invalid_argument("weighted_gl_pgf: weight matrix must be K x K");
    }
    const auto w = mu[node][j];
    if (w < 0) throw std::invalid_argument("weighted_gl_pgf: weights must be >= 0");
    const double theta = per_sender_theta ? thetas[j] : thetas[node];
    value *= std::exp(theta * (std::pow(z, static_cast<double>(w)) - 1.0));
  }
  return value;
}

JointPmf JointPmf::product(std::span<const Pmf> marginals) {
  JointPmf joint;
  std::size_t total = 1;
  for (const auto& m : marginals) {
    m.validate();
    joint.support_sizes.push_back(static_cast<int>(m.max_support()) + 1);
    total *= joint.support_sizes.back();
  }
  joint.p.assign(total, 1.0);
  std::size_t stride = total;
  for (std::size_t c = 0; c < marginals.size(); ++c) {
    stride /= joint.support_sizes[c];
    for (std::size_t idx = 0; idx < total; ++idx) {
      const auto digit = (idx / stride) % joint.support_sizes[c];
      joint.p[idx] *= marginals[c](static_cast<std::int64_t>(digit));
    }
  }
  return joint;
}

double JointPmf::at(std::span<const std::int64_t> values) const {
  if (values.size() != support_sizes.size()) {
    throw std::invalid_argument("joint pmf: wrong coordinate count");
  }
  std::size_t idx = 0;
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c] < 0 || values[c] >= support_sizes[c]) return 0.0;
    idx = idx * support_sizes[c] + static_cast<std::size_t>(values[c]);
  }
  return p[idx];
}

void JointPmf::validate() const {
  std::size_t total = 1;
  for (int s : support_sizes) {
    if (s < 1) throw std::invalid_argument("joint pmf: empty coordinate support");
    total *= static_cast<std::size_t>(s);
  }
  if (p.size() != total) throw std::invalid_argument("joint pmf: size mismatch");
  double mass = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("joint pmf: negative entry");
    mass += v;
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("joint pmf: mass differs from 1 beyond tolerance");
  }
}

double multivariate_vector_pgf(std::span<const std::vector<int>> partition,
                               std::span<const JointPmf> joint_pmfs, const FiapSpec& spec,
                               int set_index, std::span<const double> z,
                               const VectorPgfOptions& options) {
  if (set_index < 0 || static_cast<std::size_t>(set_index) >= partition.size()) {
    throw std::invalid_argument("vector pgf: set index out of range");
  }
  if (joint_pmfs.size() != partition.size()) {
    throw std::invalid_argument("vector pgf: need one joint pmf per set");
  }
  if (z.size() != static_cast<std::size_t>(spec.node_count)) {
    throw std::invalid_argument("vector pgf: z must have one entry per node");
  }
  const auto& receiving = partition[set_index];

  double expo = 0.0;
  for (std::size_t q = 0; q < partition.size(); ++q) {
    if (static_cast<int>(q) == set_index) continue;
    const auto& senders = partition[q];
    const auto& joint = joint_pmfs[q];
    joint.validate();
    const int nq = static_cast<int>(senders.size());
    if (nq > options.max_set_size) {
      throw std::invalid_argument("vector pgf: set size exceeds the enumeration budget");
    }
    if (joint.support_sizes.size() != static_cast<std::size_t>(nq)) {
      throw std::invalid_argument("vector pgf: joint pmf does not match its set");
    }
    for (int s : joint.support_sizes) {
      if (s > options.max_support) {
        throw std::invalid_argument("vector pgf: support exceeds the enumeration budget");
      }
    }
    const auto& dest = options.dest_in_receiving_set ? receiving : senders;

    std::vector<std::int64_t> n(nq, 0);
    for (std::size_t flat = 0; flat < joint.p.size(); ++flat) {
      // decode flat index into per-coordinate states
      std::size_t rem = flat;
      for (int c = nq - 1; c >= 0; --c) {
        n[c] = static_cast<std::int64_t>(rem % joint.support_sizes[c]);
        rem /= joint.support_sizes[c];
      }
      const double pn = joint.p[flat];
      if (pn == 0.0) continue;
      for (unsigned mask = 0; mask < (1u << nq); ++mask) {
        double pi = pn;
        double factor = 1.0;
        for (int c = 0; c < nq; ++c) {
          const int sender = senders[c];
          const double sc = spec.sigma[sender](n[c]);
          if (mask & (1u << c)) {
            pi *= sc;
            for (int k : dest) {
              factor *= std::pow(z[k], static_cast<double>(spec.h(k, sender)(n[c])));
            }
          } else {
            pi *= (1.0 - sc);
          }
        }
        expo += pi * (1.0 - factor);
      }
    }
  }
  return std::exp(-expo);
}

}  // namespace fiaplab
