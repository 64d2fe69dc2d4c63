#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

double integrate(const std::function<double(double)>& f, double a, double b) {
  // tanh-sinh copes with the integrable endpoint singularities of Beta
  // densities with shape parameters below one.
  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate([&f](double x) { return f(x); }, a, b, 1e-13);
}

double bisect(const std::function<double(double)>& F, double p, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (F(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double beta_pdf(double a, double b, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0) / std::beta(a, b);
}

double bivariate_normal_cdf(double x, double y, double rho) {
  const double s = std::sqrt(1.0 - rho * rho);
  const double pdf0 = 1.0 / std::sqrt(2.0 * M_PI);
  return integrate([&](double t) { return pdf0 * std::exp(-0.5 * t * t) * normal_cdf((y - rho * t) / s); },
                   -12.0, x);
}

double chi_squared_quantile(double df, double p) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared_distribution<double>(df), p));
}

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

LpResult simplex_min(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c) {
  constexpr double kTol = 1e-11;
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  const std::size_t cols = n + 2 * m;  // variables, slacks, artificials
  std::vector<std::vector<double>> T(m, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(m);
  std::vector<bool> artificial_used(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) T[i][j] = sign * A[i][j];
    T[i][n + i] = sign;
    T[i][cols] = sign * b[i];
    if (sign > 0.0) {
      basis[i] = n + i;
    } else {
      T[i][n + m + i] = 1.0;
      basis[i] = n + m + i;
      artificial_used[i] = true;
    }
  }

  auto pivot = [&](std::size_t r, std::size_t col) {
    const double p = T[r][col];
    for (double& v : T[r]) v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || T[i][col] == 0.0) continue;
      const double f = T[i][col];
      for (std::size_t j = 0; j <= cols; ++j) T[i][j] -= f * T[r][j];
    }
    basis[r] = col;
  };

  // Returns false when unbounded.
  auto run = [&](const std::vector<double>& cost, std::size_t allowed) {
    for (int iter = 0; iter < 10000; ++iter) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < allowed; ++j) {
        double reduced = cost[j];
        for (std::size_t i = 0; i < m; ++i) reduced -= cost[basis[i]] * T[i][j];
        if (reduced < -kTol) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (T[i][enter] > kTol) {
          const double ratio = T[i][cols] / T[i][enter];
          if (ratio < best - kTol || (std::fabs(ratio - best) <= kTol && leave < m && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
    return true;
  };

  LpResult result;
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (artificial_used[i]) phase1[n + m + i] = 1.0;
  }
  run(phase1, cols);
  double infeasibility = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n + m) infeasibility += T[i][cols];
  }
  if (infeasibility > 1e-9) return result;
  result.feasible = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n + m) continue;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (std::fabs(T[i][j]) > kTol) {
        pivot(i, j);
        break;
      }
    }
  }

  std::vector<double> phase2(cols, 0.0);
  std::copy(c.begin(), c.end(), phase2.begin());
  result.bounded = run(phase2, n + m);
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) result.x[basis[i]] = T[i][cols];
  }
  for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  return result;
}

}  // namespace oracle
