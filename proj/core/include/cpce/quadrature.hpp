#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cpce/copula.hpp"

namespace cpce {

/// One-dimensional rule for a probability weight (weights sum to 1).
struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Full tensor product of a 1-D rule, nodes stored row-major (N x dim) with the
/// last coordinate varying fastest.
struct TensorGrid {
  std::size_t dim = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> node(std::size_t n) const { return {nodes.data() + n * dim, dim}; }
};

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;
inline constexpr int kMaxRuleOrder = 64;

/// Probabilist Gauss-Hermite rule (weight = standard normal density), k in [1, 64].
QuadratureRule1D gauss_hermite(int k);

/// Gauss-Legendre rule on [0, 1] with unit weight, k in [1, 64].
QuadratureRule1D gauss_legendre_unit(int k);

/// k^dim, or UINT64_MAX on overflow.
std::uint64_t tensor_size(std::size_t k, std::size_t dim) noexcept;

/// Throws ResourceError naming N and the budget when k^dim exceeds it.
TensorGrid tensor_grid(const QuadratureRule1D& rule, std::size_t dim,
                       std::uint64_t node_budget = kDefaultNodeBudget);

struct IntegrationOptions {
  std::uint64_t node_budget = kDefaultNodeBudget;
  unsigned threads = 1;
};

/// Integrand over the variables listed in `dims`; receives their values in the
/// same order.
using Integrand = std::function<double(std::span<const double> xi)>;

/// Vector-valued integrand; writes one value per output slot.
using MultiIntegrand = std::function<void(std::span<const double> xi, std::span<double> out)>;

/// E[g(xi_dims)] under the Gaussian-copula joint model:
///   sum_n w_n g(F^-1(Phi(L z_n)))
/// with z_n the k^|dims| Gauss-Hermite tensor nodes and L the Cholesky factor of
/// the correlation sub-matrix on `dims`. Nodes are visited row-major and summed
/// with compensated accumulation in fixed-size blocks, so the result does not
/// depend on the thread count.
double integrate_copula(const Integrand& g, std::span<const Index> dims, const JointModel& model,
                        int k, const IntegrationOptions& options = {});

double integrate_copula(const Integrand& g, std::span<const Index> dims,
                        const GaussianCopula& copula, std::span<const Marginal> marginals, int k,
                        const IntegrationOptions& options = {});

/// Several integrands sharing the transformed nodes. Entry i of the result equals
/// integrate_copula() of the i-th output component bit for bit.
std::vector<double> integrate_copula_many(const MultiIntegrand& g, std::size_t outputs,
                                          std::span<const Index> dims, const JointModel& model,
                                          int k, const IntegrationOptions& options = {});

/// Unit-cube route: sum_n w_n g(F^-1(u_n)) c(u_n) over a Gauss-Legendre tensor grid.
/// Inexact for non-identity correlation because c(u) is not polynomial; kept as an
/// alternative backend and for cross-checks.
double integrate_copula_unit_cube(const Integrand& g, std::span<const Index> dims,
                                  const JointModel& model, int k,
                                  const IntegrationOptions& options = {});

}  // namespace cpce
