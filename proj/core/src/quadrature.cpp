#include "cpce/quadrature.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cpce/errors.hpp"
#include "cpce/parallel.hpp"

namespace cpce {

namespace {

constexpr std::size_t kNodeBlock = 4096;

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

void check_order(int k, const char* rule) {
  if (k < 1 || k > kMaxRuleOrder) {
    std::ostringstream msg;
    msg << rule << ": order k = " << k << " outside [1, " << kMaxRuleOrder << "]";
    throw ParameterError(msg.str());
  }
}

// Eigenvalues of the symmetric Jacobi matrix with zero diagonal.
std::vector<double> jacobi_eigenvalues(const Eigen::VectorXd& offdiag, int k) {
  if (k == 1) return {0.0};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(Eigen::VectorXd::Zero(k), offdiag, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// Enforces exact symmetry about zero on a sorted rule.
void symmetrize(std::vector<double>& x, std::vector<double>& w) {
  const std::size_t k = x.size();
  for (std::size_t i = 0; i < k / 2; ++i) {
    const std::size_t j = k - 1 - i;
    const double node = 0.5 * (x[j] - x[i]);
    const double weight = 0.5 * (w[i] + w[j]);
    x[i] = -node;
    x[j] = node;
    w[i] = w[j] = weight;
  }
  if (k % 2 == 1) x[k / 2] = 0.0;
}

void normalize(std::vector<double>& w) {
  Kahan total;
  for (double v : w) total.add(v);
  for (double& v : w) v /= total.sum;
}

}  // namespace

QuadratureRule1D gauss_hermite(int k) {
  check_order(k, "gauss_hermite");
  Eigen::VectorXd offdiag(std::max(k - 1, 0));
  for (int n = 1; n < k; ++n) offdiag[n - 1] = std::sqrt(static_cast<double>(n));
  std::vector<double> x = jacobi_eigenvalues(offdiag, k);
  std::vector<double> w(static_cast<std::size_t>(k));

  // Newton polish on the orthonormal Hermite polynomial p_k, then Christoffel
  // weights 1 / sum p_n(x)^2, which keep full relative accuracy in the tails.
  auto hermite = [k](double t, double& pk, double& pk1, double& christoffel) {
    double prev = 0.0;
    double cur = 1.0;
    christoffel = 1.0;
    for (int n = 0; n < k; ++n) {
      const double next = (t * cur - std::sqrt(static_cast<double>(n)) * prev) /
                          std::sqrt(static_cast<double>(n + 1));
      prev = cur;
      cur = next;
      if (n + 1 < k) christoffel += cur * cur;
    }
    pk = cur;
    pk1 = prev;
  };

  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = x[i];
    double pk = 0.0;
    double pk1 = 0.0;
    double christoffel = 1.0;
    for (int iter = 0; iter < 8; ++iter) {
      hermite(t, pk, pk1, christoffel);
      const double step = pk / (std::sqrt(static_cast<double>(k)) * pk1);
      t -= step;
      if (std::fabs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t))) {
        break;
      }
    }
    hermite(t, pk, pk1, christoffel);
    x[i] = t;
    w[i] = 1.0 / christoffel;
  }
  symmetrize(x, w);
  normalize(w);
  return {std::move(x), std::move(w)};
}

QuadratureRule1D gauss_legendre_unit(int k) {
  check_order(k, "gauss_legendre_unit");
  Eigen::VectorXd offdiag(std::max(k - 1, 0));
  for (int n = 1; n < k; ++n) {
    offdiag[n - 1] = n / std::sqrt(4.0 * n * n - 1.0);
  }
  std::vector<double> x = jacobi_eigenvalues(offdiag, k);
  std::vector<double> w(static_cast<std::size_t>(k));

  auto legendre = [k](double t, double& pk, double& pk1, double& christoffel) {
    double prev = 0.0;
    double cur = 1.0;
    christoffel = 1.0;
    for (int n = 0; n < k; ++n) {
      const double next = ((2.0 * n + 1.0) * t * cur - n * prev) / (n + 1.0);
      prev = cur;
      cur = next;
      if (n + 1 < k) christoffel += (2.0 * (n + 1) + 1.0) * cur * cur;
    }
    pk = cur;
    pk1 = prev;
  };

  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = x[i];
    double pk = 0.0;
    double pk1 = 0.0;
    double christoffel = 1.0;
    for (int iter = 0; iter < 8; ++iter) {
      legendre(t, pk, pk1, christoffel);
      const double deriv = k * (t * pk - pk1) / (t * t - 1.0);
      const double step = pk / deriv;
      t -= step;
      if (std::fabs(step) <= 4.0 * std::numeric_limits<double>::epsilon()) break;
    }
    legendre(t, pk, pk1, christoffel);
    x[i] = t;
    w[i] = 1.0 / christoffel;
  }
  symmetrize(x, w);
  normalize(w);
  for (double& t : x) t = 0.5 * (t + 1.0);
  return {std::move(x), std::move(w)};
}

std::uint64_t tensor_size(std::size_t k, std::size_t dim) noexcept {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (k != 0 && n > std::numeric_limits<std::uint64_t>::max() / k) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= k;
  }
  return n;
}

namespace {

void check_budget(std::uint64_t n, std::size_t k, std::size_t dim, std::uint64_t budget) {
  if (n > budget) {
    std::ostringstream msg;
    msg << "tensor grid with k = " << k << " and dimension " << dim << " needs N = ";
    if (n == std::numeric_limits<std::uint64_t>::max()) {
      msg << "more than 2^64";
    } else {
      msg << n;
    }
    msg << " nodes, exceeding the node budget of " << budget;
    throw ResourceError(msg.str());
  }
}

// Shared tensor-grid loop. `visit(coords, weight, out)` maps the grid point to
// integrand values; partial sums are kept per block of kNodeBlock nodes and merged
// in block order.
template <class Visit>
std::vector<double> tensor_sum(const QuadratureRule1D& rule, std::size_t dim, std::size_t outputs,
                               const IntegrationOptions& options, Visit&& visit) {
  const std::size_t k = rule.size();
  const std::uint64_t n_nodes = tensor_size(k, dim);
  check_budget(n_nodes, k, dim, options.node_budget);
  const std::size_t n = static_cast<std::size_t>(n_nodes);
  const std::size_t blocks = (n + kNodeBlock - 1) / kNodeBlock;
  std::vector<std::vector<Kahan>> partial(blocks, std::vector<Kahan>(outputs));

  parallel_for(blocks, options.threads, [&](std::size_t b) {
    const std::size_t begin = b * kNodeBlock;
    const std::size_t end = std::min(n, begin + kNodeBlock);
    std::vector<std::size_t> idx(dim);
    std::size_t rem = begin;
    for (std::size_t j = dim; j-- > 0;) {
      idx[j] = rem % k;
      rem /= k;
    }
    std::vector<double> coords(dim);
    std::vector<double> values(outputs);
    auto& acc = partial[b];
    for (std::size_t node = begin; node < end; ++node) {
      double weight = 1.0;
      for (std::size_t j = 0; j < dim; ++j) {
        coords[j] = rule.nodes[idx[j]];
        weight *= rule.weights[idx[j]];
      }
      visit(std::span<const double>(coords), std::span<double>(values));
      for (std::size_t o = 0; o < outputs; ++o) acc[o].add(weight * values[o]);
      for (std::size_t j = dim; j-- > 0;) {
        if (++idx[j] < k) break;
        idx[j] = 0;
      }
    }
  });

  std::vector<double> result(outputs);
  for (std::size_t o = 0; o < outputs; ++o) {
    Kahan total;
    for (const auto& block : partial) total.add(block[o].sum);
    result[o] = total.sum;
  }
  return result;
}

std::vector<double> latent_integrate(const MultiIntegrand& g, std::size_t outputs,
                                     std::span<const Index> dims, const GaussianCopula& copula,
                                     std::span<const Marginal> marginals, int k,
                                     const IntegrationOptions& options) {
  if (marginals.size() != copula.dim()) {
    throw ParameterError("integrate_copula: marginal count does not match copula dimension");
  }
  const QuadratureRule1D rule = gauss_hermite(k);
  const std::size_t m = dims.size();
  if (m == 0) {
    std::vector<double> out(outputs);
    g({}, out);
    return out;
  }
  const GaussianCopula sub = copula.marginalize(dims);
  const Eigen::MatrixXd& chol = sub.chol();

  return tensor_sum(rule, m, outputs, options,
                    [&](std::span<const double> z, std::span<double> out) {
                      double xi_buf[16];
                      std::vector<double> xi_heap;
                      double* xi = xi_buf;
                      if (m > 16) {
                        xi_heap.resize(m);
                        xi = xi_heap.data();
                      }
                      for (std::size_t i = 0; i < m; ++i) {
                        double y = 0.0;
                        for (std::size_t j = 0; j <= i; ++j) {
                          y += chol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[j];
                        }
                        xi[i] = marginals[dims[i]].from_latent(y);
                      }
                      g(std::span<const double>(xi, m), out);
                      for (double v : out) {
                        if (!std::isfinite(v)) {
                          throw EvaluationError("integrand returned a non-finite value",
                                                std::vector<double>(xi, xi + m));
                        }
                      }
                    });
}

}  // namespace

TensorGrid tensor_grid(const QuadratureRule1D& rule, std::size_t dim, std::uint64_t node_budget) {
  const std::size_t k = rule.size();
  const std::uint64_t n_nodes = tensor_size(k, dim);
  check_budget(n_nodes, k, dim, node_budget);
  const std::size_t n = static_cast<std::size_t>(n_nodes);

  TensorGrid grid;
  grid.dim = dim;
  grid.nodes.resize(n * dim);
  grid.weights.resize(n);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t node = 0; node < n; ++node) {
    double weight = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
      grid.nodes[node * dim + j] = rule.nodes[idx[j]];
      weight *= rule.weights[idx[j]];
    }
    grid.weights[node] = weight;
    for (std::size_t j = dim; j-- > 0;) {
      if (++idx[j] < k) break;
      idx[j] = 0;
    }
  }
  return grid;
}

double integrate_copula(const Integrand& g, std::span<const Index> dims, const JointModel& model,
                        int k, const IntegrationOptions& options) {
  return integrate_copula(g, dims, model.copula(), model.marginals(), k, options);
}

double integrate_copula(const Integrand& g, std::span<const Index> dims,
                        const GaussianCopula& copula, std::span<const Marginal> marginals, int k,
                        const IntegrationOptions& options) {
  MultiIntegrand wrapped = [&g](std::span<const double> xi, std::span<double> out) {
    out[0] = g(xi);
  };
  return latent_integrate(wrapped, 1, dims, copula, marginals, k, options)[0];
}

std::vector<double> integrate_copula_many(const MultiIntegrand& g, std::size_t outputs,
                                          std::span<const Index> dims, const JointModel& model,
                                          int k, const IntegrationOptions& options) {
  return latent_integrate(g, outputs, dims, model.copula(), model.marginals(), k, options);
}

double integrate_copula_unit_cube(const Integrand& g, std::span<const Index> dims,
                                  const JointModel& model, int k,
                                  const IntegrationOptions& options) {
  const QuadratureRule1D rule = gauss_legendre_unit(k);
  const std::size_t m = dims.size();
  if (m == 0) return g({});
  const GaussianCopula sub = model.copula().marginalize(dims);
  return tensor_sum(rule, m, 1, options, [&](std::span<const double> u, std::span<double> out) {
    std::vector<double> xi(m);
    for (std::size_t i = 0; i < m; ++i) xi[i] = model.marginal(dims[i]).inv_cdf(u[i]);
    const double value = g(xi) * sub.density(u);
    if (!std::isfinite(value)) {
      throw EvaluationError("integrand returned a non-finite value", xi);
    }
    out[0] = value;
  })[0];
}

}  // namespace cpce
