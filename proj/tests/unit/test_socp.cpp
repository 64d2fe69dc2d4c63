#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cpce/errors.hpp"
#include "cpce/socp.hpp"
#include "oracles.hpp"

using namespace cpce;

namespace {

SocConstraint cone(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::VectorXd f, double d, std::string name = "cone") {
  return SocConstraint{std::move(name), std::move(A), std::move(b), std::move(f), d};
}

}  // namespace

TEST(Socp, MaximiseOverUnitDisc) {
  ConicProgram p;
  p.c = Eigen::Vector2d(-1.0, -1.0);
  p.G = Eigen::MatrixXd(0, 2);
  p.h = Eigen::VectorXd(0);
  p.cones.push_back(cone(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), 1.0));
  const ConicSolution s = solve_conic(p);
  ASSERT_EQ(s.status, SolveStatus::optimal) << s.message;
  EXPECT_NEAR(s.objective, -std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(s.v(0), 1.0 / std::sqrt(2.0), 1e-4);
  EXPECT_NEAR(s.v(1), 1.0 / std::sqrt(2.0), 1e-4);
  EXPECT_LE(s.relative_gap, 1e-6);
  EXPECT_LE(s.primal_residual, 1e-6);
}

TEST(Socp, DistanceToQuadrant) {
  // minimise t subject to ||(x1 - 3, x2 - 4)|| <= t, x1 <= 0, x2 <= 0.
  ConicProgram p;
  p.c = Eigen::Vector3d(0, 0, 1);
  p.G = Eigen::MatrixXd::Zero(2, 3);
  p.G(0, 0) = 1.0;
  p.G(1, 1) = 1.0;
  p.h = Eigen::Vector2d::Zero();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 3);
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  p.cones.push_back(cone(A, Eigen::Vector2d(-3, -4), Eigen::Vector3d(0, 0, 1), 0.0));
  const ConicSolution s = solve_conic(p);
  ASSERT_EQ(s.status, SolveStatus::optimal) << s.message;
  EXPECT_NEAR(s.objective, 5.0, 1e-7);
  EXPECT_LE(s.stationarity_residual, 1e-6);
  ASSERT_EQ(s.slacks.size(), 3u);
  EXPECT_NEAR(s.slacks[2], 0.0, 1e-6);
}

TEST(Socp, InfeasibleProgramIsReported) {
  ConicProgram p;
  p.c = Eigen::Vector2d(1, 0);
  p.G = Eigen::MatrixXd(1, 2);
  p.G << -1.0, 0.0;  // x1 >= 2
  p.h = Eigen::VectorXd::Constant(1, -2.0);
  p.cones.push_back(cone(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), 1.0));
  const ConicSolution s = solve_conic(p);
  EXPECT_EQ(s.status, SolveStatus::infeasible);
  EXPECT_FALSE(s.message.empty());
}

TEST(Socp, InconsistentSizesAreRejected) {
  ConicProgram p;
  p.c = Eigen::Vector2d(1, 1);
  p.G = Eigen::MatrixXd::Identity(2, 3);
  p.h = Eigen::Vector2d::Zero();
  EXPECT_THROW(p.check(), ParameterError);
  EXPECT_THROW(solve_conic(p), ParameterError);
}

TEST(Socp, LinearProgramsMatchSimplexOracle) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> coef(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4, m = 3;
    // min c^T x, A x >= b (as -A x <= -b), x <= 1, x >= 0: feasible by construction.
    std::vector<std::vector<double>> A_or;
    std::vector<double> b_or, c_or(n);
    ConicProgram p;
    p.c = Eigen::VectorXd(n);
    for (int j = 0; j < n; ++j) p.c(j) = c_or[j] = coef(gen);
    p.G = Eigen::MatrixXd::Zero(m + 2 * n, n);
    p.h = Eigen::VectorXd::Zero(m + 2 * n);
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(n);
      double total = 0.0;
      for (int j = 0; j < n; ++j) total += row[j] = coef(gen);
      const double rhs = 0.4 * total;
      for (int j = 0; j < n; ++j) p.G(i, j) = -row[j];
      p.h(i) = -rhs;
      for (double& v : row) v = -v;
      A_or.push_back(row);
      b_or.push_back(-rhs);
    }
    for (int j = 0; j < n; ++j) {
      p.G(m + j, j) = 1.0;
      p.h(m + j) = 1.0;
      p.G(m + n + j, j) = -1.0;
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      A_or.push_back(row);
      b_or.push_back(1.0);
    }
    const oracle::LpResult lp = oracle::simplex_min(A_or, b_or, c_or);
    ASSERT_TRUE(lp.feasible);
    const ConicSolution s = solve_conic(p);
    ASSERT_EQ(s.status, SolveStatus::optimal) << s.message;
    EXPECT_NEAR(s.objective, lp.objective, 1e-7 * std::max(1.0, std::fabs(lp.objective))) << trial;
  }
}

TEST(Socp, DeterministicForIdenticalInput) {
  ConicProgram p;
  p.c = Eigen::Vector3d(0.3, -1.0, 1.5);
  p.G = -Eigen::MatrixXd::Identity(3, 3);
  p.h = Eigen::Vector3d::Zero();
  Eigen::MatrixXd A(2, 3);
  A << 1.0, 0.5, 0.0, 0.0, 1.0, -0.3;
  p.cones.push_back(cone(A, Eigen::Vector2d(0.1, 0.2), Eigen::Vector3d(0.2, 0.0, 1.0), 1.0));
  const ConicSolution a = solve_conic(p);
  const ConicSolution b = solve_conic(p);
  ASSERT_EQ(a.status, SolveStatus::optimal) << a.message;
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.objective, b.objective);
}
