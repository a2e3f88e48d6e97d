#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fiaplab/fiap.hpp"
#include "fiaplab/pmf.hpp"

namespace fiaplab {

// Limit activation probability theta = E[sigma(X)] under `pmf`. Tail mass
// activates at the sigma tail value.
double theta_from_pmf(const Pmf& pmf, const SigmaTable& sigma);

// Compound Poisson law: a Poisson(rate) number of i.i.d. jumps. Zero-sized
// jumps are folded into the rate on construction, so jumps(0) == 0.
struct CompoundPoissonLaw {
  double rate = 0.0;
  Pmf jumps = Pmf::delta(1);

  static CompoundPoissonLaw make(double raw_rate, const Pmf& raw_jumps);
  static CompoundPoissonLaw poisson(double rate);

  // exp(rate * (jump_pgf(z) - 1))
  double pgf(double z) const;
};

// PMF of a compound Poisson law on {0..truncation} by the jump-size
// weighted recursion p_n = (rate/n) * sum_k k q_k p_{n-k}; the remainder
// is reported as the tail.
Pmf compound_poisson_pmf(const CompoundPoissonLaw& law, std::int64_t truncation);

// Limit PGF of the arrivals to one node of a symmetric network where every
// sender follows `pmf`: exp((K-1) * (Phi(z) - 1)) with
// Phi(z) = E[z^(h(X) 1{U < sigma(X)})].
double arrival_pgf_symmetric(const FiapSpec& spec, const Pmf& pmf, double z);

// Heterogeneous version: exp(-sum_{j != i} (1 - Phi_ij(z))) where the j-th
// term applies the sender's activation law, Phi_ij(z) =
// E[z^(h_ij(X_j) 1{U < sigma_j(X_j)})] under pmfs[j].
double arrival_pgf_general(const FiapSpec& spec, std::span<const Pmf> pmfs, int node,
                           double z);

// The same limits as explicit compound Poisson laws (for PMF targets).
CompoundPoissonLaw arrival_law_symmetric(const FiapSpec& spec, const Pmf& pmf);
CompoundPoissonLaw arrival_law_general(const FiapSpec& spec, std::span<const Pmf> pmfs,
                                       int node);

// Arrival PGF for constant integer weights mu[i][j], evaluated as the
// product prod_{j != i} exp(theta * (z^mu[i][j] - 1)). The printed form of
// this product uses the receiving node's theta for every factor; pass
// per_sender_theta = true to use theta_j instead (the two agree whenever
// all thetas are equal).
double weighted_gl_pgf(const std::vector<std::vector<std::int64_t>>& mu,
                       std::span<const double> thetas, int node, double z,
                       bool per_sender_theta = false);

// Truncated joint PMF over the coordinates of one partition set, stored
// row-major over per-coordinate supports {0..size_c - 1}.
struct JointPmf {
  std::vector<int> support_sizes;
  std::vector<double> p;

  static JointPmf product(std::span<const Pmf> marginals);
  double at(std::span<const std::int64_t> values) const;
  void validate() const;
};

struct VectorPgfOptions {
  // Destination coordinates of the inner product: the receiving set when
  // true (contextual reading), the emitting set when false (as printed).
  bool dest_in_receiving_set = true;
  int max_set_size = 3;
  int max_support = 8;
};

// Multivariate PGF of the exogenous arrival vector to partition set
// `set_index`: exp(-sum_{q != p} sum_{states n of S_q} sum_{spike sets s}
// pi_{q,s,n} (1 - prod_{i in s} prod_k z_k^{h_ki(n_i)})), enumerated
// exhaustively over the truncated joint supports. z is indexed by global
// node id and must have node_count entries.
double multivariate_vector_pgf(std::span<const std::vector<int>> partition,
                               std::span<const JointPmf> joint_pmfs, const FiapSpec& spec,
                               int set_index, std::span<const double> z,
                               const VectorPgfOptions& options = {});

}  // namespace fiaplab
