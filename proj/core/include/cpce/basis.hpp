#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cpce/copula.hpp"
#include "cpce/quadrature.hpp"

namespace cpce {

/// Dense exponent vector of a multivariate monomial, one entry per variable.
using Exponents = std::vector<int>;

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(Exponents exponents);

  const Exponents& exponents() const noexcept { return exponents_; }
  std::size_t dim() const noexcept { return exponents_.size(); }
  int degree() const noexcept { return degree_; }
  /// Indices with a nonzero exponent, ascending.
  const std::vector<Index>& support() const noexcept { return support_; }

  /// Value at a full d-dimensional point.
  double evaluate(std::span<const double> xi) const;

  std::string to_string() const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exponents_ == b.exponents_; }

 private:
  Exponents exponents_;
  int degree_ = 0;
  std::vector<Index> support_;
};

Exponents add_exponents(const Exponents& a, const Exponents& b);
std::vector<Index> support_of(const Exponents& e);

/// Drops monomials that mix variable groups.
///
/// With `groups` empty nothing is filtered. Otherwise a monomial of degree >= 2 is
/// kept only when its support lies inside one group and, for multi-variable
/// supports, `keep_within_group_cross` is set. Degree 0 and 1 are always kept;
/// `whitelist` entries are always kept.
struct MonomialFilter {
  std::vector<std::vector<Index>> groups;
  bool keep_within_group_cross = true;
  std::vector<Exponents> whitelist;

  bool accepts(const Exponents& e) const;
};

/// All monomials of total degree <= max_degree in d variables that pass the
/// filter, in graded lexicographic order (constant first; within a degree,
/// x1^2 < x1 x2 < x2^2). Throws ConfigurationError on an empty result.
std::vector<Monomial> generate_monomials(std::size_t d, int max_degree,
                                         const MonomialFilter& filter = {});

/// Expectations E[xi^e] keyed by exponent vector.
class MomentTable {
 public:
  explicit MomentTable(std::size_t dim = 0);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool contains(const Exponents& e) const { return values_.count(e) != 0; }
  /// Throws Error(internal) for a missing entry.
  double at(const Exponents& e) const;
  void insert(const Exponents& e, double value);
  const std::map<Exponents, double>& entries() const noexcept { return values_; }

 private:
  std::size_t dim_;
  std::map<Exponents, double> values_;
};

/// Computes the missing E[xi^e] for every exponent vector in `needed`. Each entry
/// is integrated on its own support only; entries sharing a support share one pass
/// over the tensor grid. Throws ResourceError naming the offending exponent vector
/// when k^|support| exceeds the node budget.
void fill_moments(MomentTable& table, std::span<const Exponents> needed, const JointModel& model,
                  int k, const IntegrationOptions& options = {});

/// Table of E[m_a m_b] for all pairs of the set.
MomentTable moment_table(std::span<const Monomial> set, const JointModel& model, int k,
                         const IntegrationOptions& options = {});

/// G_ab = E[m_a m_b], read from the table by exponent addition.
Eigen::MatrixXd gram_matrix(std::span<const Monomial> set, const MomentTable& table);

struct OrthonormalizeOptions {
  /// Smallest admissible eigenvalue of the equilibrated Gram matrix.
  double min_eigenvalue = 1e-12;
  /// Refuse bases whose equilibrated condition number exceeds this.
  double max_condition = 1e12;
  bool enforce_condition = true;
};

/// psi_l = sum_j coeffs(l, j) m_j, orthonormal under the joint model.
struct OrthonormalBasis {
  std::vector<Monomial> monomials;
  Eigen::MatrixXd coeffs;        ///< lower triangular, positive diagonal
  double gram_residual = 0.0;    ///< max |B G B^T - I|
  double condition = 0.0;        ///< 2-norm condition of G
  double scaled_condition = 0.0; ///< condition of D^-1/2 G D^-1/2, D = diag(G)

  std::size_t size() const noexcept { return monomials.size(); }
  std::size_t dim() const noexcept { return monomials.empty() ? 0 : monomials.front().dim(); }
};

/// Whitening by Cholesky: G = R R^T, B = R^-1. Throws IllConditionedBasisError
/// carrying the failing pivot.
OrthonormalBasis orthonormalize(const Eigen::MatrixXd& gram, std::vector<Monomial> set,
                                const OrthonormalizeOptions& options = {});

/// Monomial values m_j(xi) at a full d-dimensional point.
Eigen::VectorXd evaluate_monomials(std::span<const Monomial> set, std::span<const double> xi);

/// (psi_0(xi), ..., psi_{M-1}(xi)); the first entry is 1.
Eigen::VectorXd evaluate_basis(const OrthonormalBasis& basis, std::span<const double> xi);

}  // namespace cpce
