#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cpce/distributions.hpp"

namespace cpce {

using Index = std::size_t;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Gaussian copula over d variables: a validated correlation matrix and its
/// lower Cholesky factor.
class GaussianCopula {
 public:
  /// Validates and factors `sigma`. Throws ValidationError on a non-square or
  /// asymmetric matrix (tolerance 1e-10) or a diagonal entry different from 1,
  /// and NotPositiveDefiniteError when the factorization fails.
  explicit GaussianCopula(const Eigen::MatrixXd& sigma);

  static GaussianCopula identity(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }
  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  const Eigen::MatrixXd& chol() const noexcept { return chol_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

  /// c(u) = phi_Sigma(Phi^-1(u)) / prod phi(Phi^-1(u_i)). Throws DomainError when
  /// any u_i is not strictly inside (0, 1).
  double density(std::span<const double> u) const;

  /// Copula over the extracted sub-matrix; the factor is recomputed on it, never
  /// sliced from the full factor.
  GaussianCopula marginalize(std::span<const Index> dims) const;

  bool is_identity() const;

 private:
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
  double min_eigenvalue_ = 1.0;
};

/// Joint distribution: Gaussian copula plus one marginal per variable.
class JointModel {
 public:
  JointModel(GaussianCopula copula, std::vector<Marginal> marginals);

  std::size_t dim() const noexcept { return copula_.dim(); }
  const GaussianCopula& copula() const noexcept { return copula_; }
  const std::vector<Marginal>& marginals() const noexcept { return marginals_; }
  const Marginal& marginal(Index i) const { return marginals_.at(i); }

  JointModel marginalize(std::span<const Index> dims) const;
  /// Same marginals, identity correlation.
  JointModel independent() const;

 private:
  GaussianCopula copula_;
  std::vector<Marginal> marginals_;
};

struct SampleOptions {
  unsigned threads = 1;
};

/// n x d draws: z ~ N(0, I), y = L z, xi_i = F_i^-1(Phi(y_i)). Deterministic in
/// (seed, n) and independent of the thread count. Row r uses counters
/// [r*d, (r+1)*d) of a CounterRng seeded with `seed`.
RowMatrix sample(const JointModel& model, std::size_t n, std::uint64_t seed,
                 const SampleOptions& options = {});

/// As sample(), with the correlation replaced by the identity. Shares the latent
/// draws of sample() for the same seed.
RowMatrix sample_independent(const JointModel& model, std::size_t n, std::uint64_t seed,
                             const SampleOptions& options = {});

/// Latent standard-normal draws (before coloring), same counters as sample().
RowMatrix sample_latent(std::size_t dim, std::size_t n, std::uint64_t seed,
                        const SampleOptions& options = {});

}  // namespace cpce
