#pragma once

#include <vector>

namespace fiaplab {

// Stationary rate of the fully-connected counting model with base rate b
// and synaptic weight mu: the unique beta > 0 with
//   beta = mu c^a e^(-c) / gamma(a, c),  a = ((K-1) beta + b) / mu,
//                                        c = (K-1) beta / mu.
struct CountingModelParams {
  double base_rate = 0.0;  // b
  double weight = 0.0;     // mu
  int node_count = 0;      // K
  double rate = 0.0;       // beta
  double a = 0.0;
  double c = 0.0;
  double residual = 0.0;   // |beta - rhs(beta)| at the returned rate
};

// Bracketing bisection on [1e-8, b + mu (K-1)] to 1e-12, then three
// fixed-point polish iterations. Throws on invalid input or if the defect
// map has no sign change over the bracket (message carries the bracket).
CountingModelParams solve_counting_rate(double base_rate, double weight, int node_count);

// Numerical solution of beta - mu z G'(z) + (beta (K-1)(z-1) - b) G(z) = 0
// on [0, 1]. z = 0 is a removable singular point; integration starts from a
// second-order series at z = 1e-3 and proceeds with an adaptive embedded
// Runge-Kutta pair, landing exactly on the output grid.
struct CountingOdeSolution {
  std::vector<double> z;
  std::vector<double> g;
  double endpoint_error = 0.0;  // |G(1) - 1|
};

CountingOdeSolution integrate_counting_ode(const CountingModelParams& params,
                                           double grid_step);

}  // namespace fiaplab
