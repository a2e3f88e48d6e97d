#pragma once

// Test-side oracles, independent of the library implementation paths they
// check: an n-fold convolution double sum for compound Poisson PMFs and an
// adaptive Simpson quadrature for the lower incomplete gamma function.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracles {

// P(X = v) = sum_n e^-rate rate^n / n! q*n(v), truncated when the Poisson
// weights are exhausted.
inline std::vector<double> compound_pmf(double rate, const std::vector<double>& jumps,
                                        int truncation) {
  std::vector<double> result(truncation + 1, 0.0);
  std::vector<double> conv{1.0};  // 0-fold convolution = delta_0
  double poisson_weight = std::exp(-rate);
  for (int n = 0;; ++n) {
    for (int v = 0; v < std::min<int>(conv.size(), truncation + 1); ++v) {
      result[v] += poisson_weight * conv[v];
    }
    if (n > 200 && poisson_weight < 1e-22) break;
    std::vector<double> next(
        std::min<std::size_t>(conv.size() + jumps.size() - 1, truncation + 1), 0.0);
    for (std::size_t a = 0; a < conv.size(); ++a) {
      for (std::size_t b = 0; b < jumps.size(); ++b) {
        if (a + b < next.size()) next[a + b] += conv[a] * jumps[b];
      }
    }
    conv = std::move(next);
    poisson_weight *= rate / static_cast<double>(n + 1);
  }
  return result;
}

namespace detail {

inline double gamma_integrand(double a, double t) {
  return std::pow(t, a - 1.0) * std::exp(-t);
}

inline double simpson_rule(double a_param, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  return (hi - lo) / 6.0 *
         (gamma_integrand(a_param, lo) + 4.0 * gamma_integrand(a_param, mid) +
          gamma_integrand(a_param, hi));
}

inline double adaptive_simpson(double a_param, double lo, double hi, double whole,
                               double eps, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = simpson_rule(a_param, lo, mid);
  const double right = simpson_rule(a_param, mid, hi);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(a_param, lo, mid, left, eps / 2.0, depth - 1) +
         adaptive_simpson(a_param, mid, hi, right, eps / 2.0, depth - 1);
}

}  // namespace detail

// Head series around the (possibly singular) origin plus adaptive Simpson
// on the rest; relative accuracy well below 1e-11.
inline double lower_gamma_quadrature(double a, double c) {
  if (c == 0.0) return 0.0;
  const double eps = std::min(c, 0.1);
  double head = 0.0;
  double factorial = 1.0;
  for (int n = 0; n < 60; ++n) {
    if (n > 0) factorial *= -static_cast<double>(n);
    const double term = std::pow(eps, a + n) / (factorial * (a + n));
    head += (n % 2 == 0 ? std::abs(term) : -std::abs(term));
    if (std::abs(term) < 1e-18) break;
  }
  if (eps >= c) return head;
  const double whole = detail::simpson_rule(a, eps, c);
  const double tol = 1e-13 * std::max(1.0, std::abs(whole));
  return head + detail::adaptive_simpson(a, eps, c, whole, tol, 40);
}

}  // namespace oracles
