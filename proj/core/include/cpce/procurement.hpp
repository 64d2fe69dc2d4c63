#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpce/pce.hpp"
#include "cpce/socp.hpp"

namespace cpce {

/// Two-zone reserve procurement: bids 0..n_x-1 sit in zone X, the rest in zone Y.
struct ProcurementSpec {
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  double reserve_x = 0.0;
  double reserve_y = 0.0;
  double tie_xy = 0.0;  ///< limit on zone-X bids procured for zone Y
  double tie_yx = 0.0;  ///< limit on zone-Y bids procured for zone X
  double epsilon = 0.01;
  Eigen::VectorXd costs;

  std::size_t bids() const noexcept { return n_x + n_y; }
  /// Throws ValidationError on negative limits, epsilon outside (0, 0.5) or a cost
  /// vector of the wrong length.
  void check() const;
};

enum class QuantileDistribution { normal };

/// lambda with mu + lambda sigma at the p-quantile. Throws DomainError unless 0 < p < 1.
double quantile_factor(double p, QuantileDistribution dist = QuantileDistribution::normal);

struct QuantilePair {
  double lambda_lo = 0.0;  ///< negative, lower epsilon-quantile
  double lambda_hi = 0.0;  ///< positive, upper (1 - epsilon)-quantile

  static QuantilePair from_epsilon(double epsilon,
                                   QuantileDistribution dist = QuantileDistribution::normal);
};

enum class ConstraintId { reserve_x, reserve_y, tie_xy, tie_yx };

inline constexpr std::array<ConstraintId, 4> kAllConstraints = {
    ConstraintId::reserve_x, ConstraintId::reserve_y, ConstraintId::tie_xy, ConstraintId::tie_yx};

const char* to_string(ConstraintId id) noexcept;
/// Reserve constraints are lower bounds on procured power, tie-line constraints
/// upper bounds.
bool is_lower_bound(ConstraintId id) noexcept;

/// Procured-power weights of one chance constraint over all bids: x (or y)
/// restricted to the constraint's column range, zeros elsewhere.
Eigen::VectorXd constraint_weights(ConstraintId id, const ProcurementSpec& spec,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double constraint_bound(ConstraintId id, const ProcurementSpec& spec) noexcept;

/// Variables (x, y) stacked; linear objective c^T (x + y); box rows x >= 0, y >= 0,
/// x + y <= 1; cones in the order reserve_x, reserve_y, tie_xy, tie_yx.
ConicProgram assemble(const ProcurementSpec& spec, const PceMatrix& pce, const QuantilePair& lambda);

struct ProcurementSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double objective = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  std::vector<double> residuals;  ///< per-constraint slack, linear rows then cones
  double duality_gap = 0.0;
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double stationarity_residual = 0.0;
  int newton_steps = 0;
  std::string message;
};

ProcurementSolution solve(const ConicProgram& program, std::size_t bids,
                          const SolverSettings& settings = {});

/// assemble() followed by solve().
ProcurementSolution solve_procurement(const ProcurementSpec& spec, const PceMatrix& pce,
                                      const QuantilePair& lambda, const SolverSettings& settings = {});

struct ConstraintMargin {
  ConstraintId id;
  double mean = 0.0;
  double sigma = 0.0;
  double quantile = 0.0;  ///< mu + lambda sigma with the constraint's lambda
  double bound = 0.0;
  double margin = 0.0;    ///< >= 0 when satisfied
  bool active = false;    ///< margin <= 1e-5 * max(bound, 1)
};

std::array<ConstraintMargin, 4> analytic_quantile_check(const ProcurementSolution& solution,
                                                        const PceMatrix& pce,
                                                        const ProcurementSpec& spec,
                                                        const QuantilePair& lambda);

}  // namespace cpce
