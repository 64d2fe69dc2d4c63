#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cpce {

/// ||A v + b||_2 <= f^T v + d
struct SocConstraint {
  std::string name;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd f;
  double d = 0.0;
};

/// minimize c^T v  s.t.  G v <= h  and a list of second-order cone constraints.
struct ConicProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  std::vector<std::string> linear_names;
  std::vector<SocConstraint> cones;

  Eigen::Index variables() const noexcept { return c.size(); }
  /// Throws ParameterError on inconsistent sizes.
  void check() const;
};

enum class SolveStatus { optimal, infeasible, numerical_failure };

const char* to_string(SolveStatus status) noexcept;

struct SolverSettings {
  double gap_tolerance = 1e-9;   ///< relative duality gap target
  double barrier_growth = 20.0;
  double newton_tolerance = 1e-20;  ///< on half the squared Newton decrement
  int max_newton_steps = 200;
  int max_outer_iterations = 100;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd v;
  double objective = 0.0;
  double duality_gap = 0.0;           ///< absolute, barrier parameter / t
  double relative_gap = 0.0;
  double primal_residual = 0.0;       ///< max constraint violation (>= 0)
  double stationarity_residual = 0.0; ///< max-norm KKT stationarity, multipliers >= 0
  int newton_steps = 0;
  /// Slack per constraint: linear rows first, then one entry per cone
  /// (f^T v + d - ||A v + b||).
  std::vector<double> slacks;
  std::string message;  ///< infeasibility / failure detail
};

/// Primal log-barrier interior-point method with a phase-I feasibility search.
/// Deterministic for identical input.
ConicSolution solve_conic(const ConicProgram& program, const SolverSettings& settings = {});

}  // namespace cpce
