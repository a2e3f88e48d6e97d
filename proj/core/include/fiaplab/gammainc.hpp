#pragma once

namespace fiaplab {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// computed by the power series for x < a + 1 and by the Lentz continued
// fraction for the upper tail otherwise. Relative accuracy ~1e-14.
double regularized_gamma_p(double a, double x);

// log P(a, x), stable for values of (a, x) where P underflows.
double log_regularized_gamma_p(double a, double x);

// Lower incomplete gamma gamma(a, x) = integral_0^x t^(a-1) e^(-t) dt.
// Requires a > 0, x >= 0.
double lower_incomplete_gamma(double a, double x);

}  // namespace fiaplab
