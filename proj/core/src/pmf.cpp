#include "fiaplab/pmf.hpp"

#include <cmath>
#include <stdexcept>

namespace fiaplab {

Pmf::Pmf(std::vector<double> probabilities, double tail)
    : p_(std::move(probabilities)), tail_(tail) {
  validate();
}

Pmf Pmf::delta(std::int64_t k) {
  if (k < 0) throw std::invalid_argument("pmf: support must be non-negative");
  std::vector<double> p(k + 1, 0.0);
  p[k] = 1.0;
  return Pmf(std::move(p));
}

Pmf Pmf::uniform_range(std::int64_t lo, std::int64_t hi) {
  if (lo < 0 || hi < lo) throw std::invalid_argument("pmf: bad uniform range");
  std::vector<double> p(hi + 1, 0.0);
  const double w = 1.0 / static_cast<double>(hi - lo + 1);
  for (std::int64_t k = lo; k <= hi; ++k) p[k] = w;
  return Pmf(std::move(p));
}

Pmf Pmf::geometric(double p, double tail_budget) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("pmf: geometric needs p in (0,1]");
  std::vector<double> probs;
  double mass = 0.0;
  double term = p;
  while (mass < 1.0 - tail_budget) {
    probs.push_back(term);
    mass += term;
    term *= (1.0 - p);
    if (probs.size() > 100000) break;
  }
  return Pmf(std::move(probs), 1.0 - mass);
}

double Pmf::operator()(std::int64_t k) const {
  if (k < 0 || k >= static_cast<std::int64_t>(p_.size())) return 0.0;
  return p_[k];
}

double Pmf::mass() const {
  double s = tail_;
  for (double v : p_) s += v;
  return s;
}

void Pmf::validate() const {
  if (p_.empty()) throw std::invalid_argument("pmf: empty support");
  for (double v : p_) {
    if (!(v >= 0.0)) throw std::invalid_argument("pmf: negative or NaN entry");
  }
  if (!(tail_ >= 0.0)) throw std::invalid_argument("pmf: negative tail");
  if (std::abs(mass() - 1.0) > 1e-12) {
    throw std::invalid_argument("pmf: total mass differs from 1 by more than 1e-12");
  }
}

double Pmf::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) m += static_cast<double>(k) * p_[k];
  return m;
}

std::int64_t Pmf::quantile_cut(double epsilon) const {
  double cum = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    cum += p_[k];
    if (cum >= 1.0 - epsilon) return static_cast<std::int64_t>(k);
  }
  return max_support();
}

std::int64_t Pmf::sample(double u) const {
  double cum = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    cum += p_[k];
    if (u < cum) return static_cast<std::int64_t>(k);
  }
  return max_support();
}

}  // namespace fiaplab
