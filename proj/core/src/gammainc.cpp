#include "fiaplab/gammainc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fiaplab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const double kFpMin = std::numeric_limits<double>::min() / kEps;
constexpr int kMaxIter = 1000;

// Series branch, valid for x < a + 1. Returns the series sum
// S = sum_n x^n / (a (a+1) ... (a+n)); P = S * exp(a ln x - x - lgamma(a)).
double lower_series_sum(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) return sum;
  }
  throw std::runtime_error("regularized_gamma_p: series did not converge");
}

// Lentz continued fraction for the upper tail, valid for x >= a + 1.
// Returns H with Q = H * exp(a ln x - x - lgamma(a)).
double upper_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h;
  }
  throw std::runtime_error("regularized_gamma_p: continued fraction did not converge");
}

void check_args(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("incomplete gamma: a must be positive");
  if (!(x >= 0.0)) throw std::invalid_argument("incomplete gamma: x must be non-negative");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  const double scale = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    return lower_series_sum(a, x) * std::exp(scale);
  }
  return 1.0 - upper_cf(a, x) * std::exp(scale);
}

double log_regularized_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  const double scale = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    return std::log(lower_series_sum(a, x)) + scale;
  }
  const double q = upper_cf(a, x) * std::exp(scale);
  return std::log1p(-q);
}

double lower_incomplete_gamma(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  return std::exp(std::lgamma(a) + log_regularized_gamma_p(a, x));
}

}  // namespace fiaplab
