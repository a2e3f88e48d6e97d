#pragma once

#include <cstdint>
#include <vector>

namespace fiaplab {

// Probability mass function on {0,...,S} with an explicit tail term for
// mass past the stored support. Tails are carried around, never dropped.
class Pmf {
 public:
  Pmf() = default;
  explicit Pmf(std::vector<double> probabilities, double tail = 0.0);

  static Pmf delta(std::int64_t k);
  static Pmf uniform_range(std::int64_t lo, std::int64_t hi);
  // Geometric on {0,1,...} with success probability p, truncated where the
  // retained mass first exceeds 1 - tail_budget; the remainder goes to tail.
  static Pmf geometric(double p, double tail_budget = 1e-10);

  double operator()(std::int64_t k) const;
  std::int64_t max_support() const { return static_cast<std::int64_t>(p_.size()) - 1; }
  const std::vector<double>& probabilities() const { return p_; }
  double tail() const { return tail_; }
  double mass() const;

  // Throws unless entries are >= 0 and total mass is 1 within 1e-12.
  void validate() const;

  double mean() const;
  // Smallest N with P(X <= N) >= 1 - epsilon (tail counts as beyond any N).
  std::int64_t quantile_cut(double epsilon) const;

  // Inverse-CDF sample for a uniform u in [0,1); tail mass maps to the
  // last stored support point.
  std::int64_t sample(double u) const;

  bool operator==(const Pmf&) const = default;

 private:
  std::vector<double> p_;
  double tail_ = 0.0;
};

}  // namespace fiaplab
