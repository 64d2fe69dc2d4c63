#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cpce/basis.hpp"

namespace cpce {

enum class Zone { X, Y };

const char* to_string(Zone zone) noexcept;

/// coef * prod xi_i^p over the listed (index, power) pairs.
struct PolyTerm {
  double coef = 0.0;
  std::vector<std::pair<Index, int>> powers;
};

/// Random available power E_i(xi) of one bid, a polynomial in the inputs.
class BidFunction {
 public:
  BidFunction(std::string id, std::vector<PolyTerm> terms, Zone zone, double cost);

  const std::string& id() const noexcept { return id_; }
  const std::vector<PolyTerm>& terms() const noexcept { return terms_; }
  Zone zone() const noexcept { return zone_; }
  double cost() const noexcept { return cost_; }
  const std::vector<Index>& support() const noexcept { return support_; }
  int degree() const noexcept { return degree_; }
  /// Largest variable index referenced plus one.
  std::size_t min_dim() const noexcept { return min_dim_; }

  /// Value at a full d-dimensional point.
  double evaluate(std::span<const double> xi) const;

  /// Dense exponent vectors of the terms for a d-variable model.
  std::vector<std::pair<double, Exponents>> dense_terms(std::size_t d) const;

 private:
  std::string id_;
  std::vector<PolyTerm> terms_;
  Zone zone_;
  double cost_;
  std::vector<Index> support_;
  int degree_ = 0;
  std::size_t min_dim_ = 0;
};

/// Coefficients of several bids on one basis: a0 (means) and A (higher terms),
/// one column per bid.
struct PceMatrix {
  Eigen::VectorXd a0;
  Eigen::MatrixXd A;
  std::string basis_ref;

  std::size_t bids() const noexcept { return static_cast<std::size_t>(a0.size()); }
  std::size_t basis_size() const noexcept { return static_cast<std::size_t>(A.rows()) + 1; }
  /// Full coefficient vector (a_0, a_1, ..., a_L) of bid j.
  Eigen::VectorXd column(std::size_t j) const;
};

/// Builds a PceMatrix from per-bid coefficient vectors of equal length.
PceMatrix make_pce_matrix(std::span<const Eigen::VectorXd> coefficients, std::string basis_ref);

enum class ProjectionMode {
  /// E[q m_j] expanded into monomial expectations E[xi^(t + alpha_j)], each
  /// integrated on its own support and shared with the basis moment table.
  moments,
  /// E[q m_j] integrated directly on support(q) u support(m_j).
  direct,
};

struct ExpandOptions {
  ProjectionMode mode = ProjectionMode::moments;
  IntegrationOptions integration;
};

/// Quadrature order that integrates q * m_j exactly in latent-linear cases.
int default_projection_order(int bid_degree, int max_monomial_degree);

/// a_l = sum_j B_lj E[q m_j]. In moments mode, `moments` (if given) is read and
/// extended; pass the basis' own table to keep projections consistent with G.
Eigen::VectorXd expand(const BidFunction& q, const OrthonormalBasis& basis, const JointModel& model,
                       int k, const ExpandOptions& options = {}, MomentTable* moments = nullptr);

struct OutputMoments {
  double mean = 0.0;
  double sigma = 0.0;  ///< standard deviation
};

/// mean = a_0, sigma = ||(a_1, ..., a_L)||_2.
OutputMoments moments(const Eigen::VectorXd& coeffs);

/// Coefficients of sum_j z_j E_j: (a0 . z, A z).
Eigen::VectorXd combine(const Eigen::VectorXd& weights, const PceMatrix& pce);

/// sum_l a_l psi_l(xi).
double evaluate_expansion(const Eigen::VectorXd& coeffs, const OrthonormalBasis& basis,
                          std::span<const double> xi);

/// max_n |q(xi_n) - sum a_l psi_l(xi_n)| / max(|q(xi_n)|, 1e-12) over n copula draws.
double expansion_error(const BidFunction& q, const Eigen::VectorXd& coeffs,
                       const OrthonormalBasis& basis, const JointModel& model, std::size_t n,
                       std::uint64_t seed);

/// As above on pre-drawn samples (rows are points).
double expansion_error(const BidFunction& q, const Eigen::VectorXd& coeffs,
                       const OrthonormalBasis& basis, const RowMatrix& samples);

}  // namespace cpce
