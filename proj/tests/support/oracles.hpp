#pragma once

// Reference computations used by the tests. Nothing here calls into cpce, so a
// bug in the library cannot hide behind a matching bug in its oracle.

#include <functional>
#include <span>
#include <vector>

namespace oracle {

/// Adaptive Gauss-Kronrod integral of f over [a, b] (infinite limits allowed).
double integrate(const std::function<double(double)>& f, double a, double b);

/// Root of F(x) = p on [lo, hi] by bisection; F nondecreasing.
double bisect(const std::function<double(double)>& F, double p, double lo, double hi);

/// Standard normal CDF and quantile from Boost.Math.
double normal_cdf(double x);
double normal_quantile(double p);

/// Beta(a, b) density on [0, 1] from the closed form.
double beta_pdf(double a, double b, double x);

/// P(Z1 <= x, Z2 <= y) for a standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double x, double y, double rho);

/// Upper p-quantile of the chi-squared distribution.
double chi_squared_quantile(double df, double p);

/// (n)!! for odd or even n >= -1.
double double_factorial(int n);

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct LpResult {
  bool feasible = false;
  bool bounded = true;
  double objective = 0.0;
  std::vector<double> x;
};

/// min c^T x subject to A x <= b, x >= 0: dense two-phase tableau simplex with
/// Bland's rule.
LpResult simplex_min(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c);

}  // namespace oracle
