#include "fiaplab/counting_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fiaplab/gammainc.hpp"

namespace fiaplab {

namespace {

// log of rhs(beta) = mu c^a e^(-c) / gamma(a, c), computed in log space so
// large (a, c) never overflow.
double log_rhs(double b, double mu, int k, double beta) {
  const double c = (k - 1) * beta / mu;
  const double a = c + b / mu;
  return std::log(mu) + a * std::log(c) - c - std::lgamma(a) -
         log_regularized_gamma_p(a, c);
}

struct Derivative {
  double b, mu, beta, c;
  double operator()(double z, double g) const {
    return (beta + (mu * c * (z - 1.0) - b) * g) / (mu * z);
  }
};

}  // namespace

CountingModelParams solve_counting_rate(double base_rate, double weight, int node_count) {
  if (!(base_rate > 0.0) || !(weight > 0.0)) {
    throw std::invalid_argument("solve_counting_rate: b and mu must be positive");
  }
  if (node_count < 2) {
    throw std::invalid_argument(
        "solve_counting_rate: node count must be at least 2 (with K = 1 the "
        "interaction term vanishes and c = 0 makes gamma(a, 0) = 0)");
  }
  const double b = base_rate;
  const double mu = weight;
  const int k = node_count;

  auto defect = [&](double beta) { return beta - std::exp(log_rhs(b, mu, k, beta)); };

  double lo = 1e-8;
  double hi = b + mu * (k - 1);
  double flo = defect(lo);
  double fhi = defect(hi);
  if (flo * fhi > 0.0) {
    std::ostringstream msg;
    msg << "solve_counting_rate: no sign change on bracket [" << lo << ", " << hi
        << "], defect " << flo << " .. " << fhi;
    throw std::runtime_error(msg.str());
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = defect(mid);
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  double beta = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    beta = std::exp(log_rhs(b, mu, k, beta));
  }

  CountingModelParams params;
  params.base_rate = b;
  params.weight = mu;
  params.node_count = k;
  params.rate = beta;
  params.c = (k - 1) * beta / mu;
  params.a = params.c + b / mu;
  params.residual = std::abs(defect(beta));
  return params;
}

CountingOdeSolution integrate_counting_ode(const CountingModelParams& params,
                                           double grid_step) {
  if (!(params.rate > 0.0) || !(params.a > 0.0) || !(params.c > 0.0)) {
    throw std::invalid_argument("integrate_counting_ode: params are not solved");
  }
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw std::invalid_argument("integrate_counting_ode: grid step must be in (0, 1]");
  }
  const double a = params.a;
  const double c = params.c;
  const Derivative f{params.base_rate, params.weight, params.rate, c};

  // Analytic-at-zero start: G is regular at the z = 0 singular point with
  // coefficients g0 = beta / (mu a), g_n = c g_{n-1} / (a + n).
  const double g0 = params.rate / (params.weight * a);
  const double g1 = c * g0 / (a + 1.0);
  const double g2 = c * g1 / (a + 2.0);
  auto series = [&](double z) { return g0 + g1 * z + g2 * z * z; };

  const int n = std::max(1, static_cast<int>(std::lround(1.0 / grid_step)));
  CountingOdeSolution sol;
  sol.z.reserve(n + 1);
  sol.g.reserve(n + 1);

  const double start = std::min(1e-3, 0.5 / n);
  double z = start;
  double g = series(start);
  double h = start;

  constexpr double rtol = 1e-10;
  constexpr double atol = 1e-14;

  auto advance_to = [&](double target) {
    while (z < target) {
      double step = std::min(h, target - z);
      for (;;) {
        // Cash-Karp embedded 4(5) pair
        const double k1 = f(z, g);
        const double k2 = f(z + step / 5.0, g + step * (k1 / 5.0));
        const double k3 = f(z + 3.0 * step / 10.0, g + step * (3.0 * k1 + 9.0 * k2) / 40.0);
        const double k4 = f(z + 3.0 * step / 5.0,
                            g + step * (3.0 * k1 / 10.0 - 9.0 * k2 / 10.0 + 6.0 * k3 / 5.0));
        const double k5 = f(z + step, g + step * (-11.0 * k1 / 54.0 + 5.0 * k2 / 2.0 -
                                                  70.0 * k3 / 27.0 + 35.0 * k4 / 27.0));
        const double k6 =
            f(z + 7.0 * step / 8.0,
              g + step * (1631.0 * k1 / 55296.0 + 175.0 * k2 / 512.0 + 575.0 * k3 / 13824.0 +
                          44275.0 * k4 / 110592.0 + 253.0 * k5 / 4096.0));
        const double g5 = g + step * (37.0 * k1 / 378.0 + 250.0 * k3 / 621.0 +
                                      125.0 * k4 / 594.0 + 512.0 * k6 / 1771.0);
        const double g4 = g + step * (2825.0 * k1 / 27648.0 + 18575.0 * k3 / 48384.0 +
                                      13525.0 * k4 / 55296.0 + 277.0 * k5 / 14336.0 +
                                      k6 / 4.0);
        const double err = std::abs(g5 - g4);
        const double tol = atol + rtol * std::max(std::abs(g), std::abs(g5));
        if (err <= tol) {
          z += step;
          g = g5;
          const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
          h = step * std::min(5.0, std::max(1.0, grow));
          break;
        }
        step *= std::max(0.2, 0.9 * std::pow(tol / err, 0.25));
        if (step < 1e-14) {
          std::ostringstream msg;
          msg << "integrate_counting_ode: step underflow at z = " << z
              << " (step = " << step << ")";
          throw std::runtime_error(msg.str());
        }
      }
    }
  };

  for (int j = 0; j <= n; ++j) {
    const double target = static_cast<double>(j) / n;
    if (target <= start) {
      sol.z.push_back(target);
      sol.g.push_back(series(target));
      continue;
    }
    advance_to(target);
    sol.z.push_back(target);
    sol.g.push_back(g);
  }
  sol.endpoint_error = std::abs(sol.g.back() - 1.0);
  return sol;
}

}  // namespace fiaplab
