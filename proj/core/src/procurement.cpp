#include "cpce/procurement.hpp"

#include <cmath>
#include <sstream>

#include "cpce/distributions.hpp"
#include "cpce/errors.hpp"

namespace cpce {

namespace {

constexpr double kActiveTolerance = 1e-5;

Eigen::VectorXd zone_mask(const ProcurementSpec& spec, Zone zone) {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.bids()));
  if (zone == Zone::X) {
    mask.head(static_cast<Eigen::Index>(spec.n_x)).setOnes();
  } else {
    mask.tail(static_cast<Eigen::Index>(spec.n_y)).setOnes();
  }
  return mask;
}

}  // namespace

void ProcurementSpec::check() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string("procurement.") + name + " must be finite and >= 0");
    }
  };
  nonneg(reserve_x, "reserve_x");
  nonneg(reserve_y, "reserve_y");
  nonneg(tie_xy, "tie_xy");
  nonneg(tie_yx, "tie_yx");
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ValidationError("procurement.epsilon must lie in (0, 0.5)");
  }
  if (static_cast<std::size_t>(costs.size()) != bids()) {
    throw ValidationError("procurement cost vector length differs from the bid count");
  }
  if (bids() == 0) throw ValidationError("procurement needs at least one bid");
}

double quantile_factor(double p, QuantileDistribution dist) {
  switch (dist) {
    case QuantileDistribution::normal: return std_normal_inv_cdf(p);
  }
  throw ParameterError("unsupported quantile distribution");
}

QuantilePair QuantilePair::from_epsilon(double epsilon, QuantileDistribution dist) {
  return {quantile_factor(epsilon, dist), quantile_factor(1.0 - epsilon, dist)};
}

const char* to_string(ConstraintId id) noexcept {
  switch (id) {
    case ConstraintId::reserve_x: return "reserve_x";
    case ConstraintId::reserve_y: return "reserve_y";
    case ConstraintId::tie_xy: return "tie_xy";
    case ConstraintId::tie_yx: return "tie_yx";
  }
  return "unknown";
}

bool is_lower_bound(ConstraintId id) noexcept {
  return id == ConstraintId::reserve_x || id == ConstraintId::reserve_y;
}

Eigen::VectorXd constraint_weights(ConstraintId id, const ProcurementSpec& spec,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  switch (id) {
    case ConstraintId::reserve_x: return x;
    case ConstraintId::reserve_y: return y;
    case ConstraintId::tie_xy: return y.cwiseProduct(zone_mask(spec, Zone::X));
    case ConstraintId::tie_yx: return x.cwiseProduct(zone_mask(spec, Zone::Y));
  }
  return x;
}

double constraint_bound(ConstraintId id, const ProcurementSpec& spec) noexcept {
  switch (id) {
    case ConstraintId::reserve_x: return spec.reserve_x;
    case ConstraintId::reserve_y: return spec.reserve_y;
    case ConstraintId::tie_xy: return spec.tie_xy;
    case ConstraintId::tie_yx: return spec.tie_yx;
  }
  return 0.0;
}

ConicProgram assemble(const ProcurementSpec& spec, const PceMatrix& pce, const QuantilePair& lambda) {
  spec.check();
  if (pce.bids() != spec.bids()) {
    std::ostringstream msg;
    msg << "coefficient matrix has " << pce.bids() << " columns for " << spec.bids() << " bids";
    throw ParameterError(msg.str());
  }
  const auto z = static_cast<Eigen::Index>(spec.bids());
  const Eigen::Index rows = pce.A.rows();

  ConicProgram p;
  p.c.resize(2 * z);
  p.c << spec.costs, spec.costs;

  p.G = Eigen::MatrixXd::Zero(3 * z, 2 * z);
  p.h = Eigen::VectorXd::Zero(3 * z);
  for (Eigen::Index i = 0; i < z; ++i) {
    p.G(i, i) = -1.0;
    p.G(z + i, z + i) = -1.0;
    p.G(2 * z + i, i) = 1.0;
    p.G(2 * z + i, z + i) = 1.0;
    p.h[2 * z + i] = 1.0;
  }
  for (Eigen::Index i = 0; i < z; ++i) p.linear_names.push_back("x[" + std::to_string(i) + "] >= 0");
  for (Eigen::Index i = 0; i < z; ++i) p.linear_names.push_back("y[" + std::to_string(i) + "] >= 0");
  for (Eigen::Index i = 0; i < z; ++i) p.linear_names.push_back("x[" + std::to_string(i) + "] + y[" + std::to_string(i) + "] <= 1");

  const double lo = std::fabs(lambda.lambda_lo);
  const double hi = lambda.lambda_hi;
  const Eigen::VectorXd mask_x = zone_mask(spec, Zone::X);
  const Eigen::VectorXd mask_y = zone_mask(spec, Zone::Y);

  // |lambda_lo| ||A v|| <= a0^T v - R on the x (offset 0) or y (offset z) block.
  auto reserve = [&](const char* name, Eigen::Index offset, double bound) {
    SocConstraint cone;
    cone.name = name;
    cone.A = Eigen::MatrixXd::Zero(rows, 2 * z);
    cone.A.middleCols(offset, z) = lo * pce.A;
    cone.b = Eigen::VectorXd::Zero(rows);
    cone.f = Eigen::VectorXd::Zero(2 * z);
    cone.f.segment(offset, z) = pce.a0;
    cone.d = -bound;
    return cone;
  };
  // lambda_hi ||A_S v_S|| <= T - a0_S^T v_S for the masked column range S.
  auto tie = [&](const char* name, Eigen::Index offset, const Eigen::VectorXd& mask, double bound) {
    SocConstraint cone;
    cone.name = name;
    cone.A = Eigen::MatrixXd::Zero(rows, 2 * z);
    cone.A.middleCols(offset, z) = hi * pce.A * mask.asDiagonal();
    cone.b = Eigen::VectorXd::Zero(rows);
    cone.f = Eigen::VectorXd::Zero(2 * z);
    cone.f.segment(offset, z) = -pce.a0.cwiseProduct(mask);
    cone.d = bound;
    return cone;
  };
  p.cones.push_back(reserve("reserve_x", 0, spec.reserve_x));
  p.cones.push_back(reserve("reserve_y", z, spec.reserve_y));
  p.cones.push_back(tie("tie_xy", z, mask_x, spec.tie_xy));
  p.cones.push_back(tie("tie_yx", 0, mask_y, spec.tie_yx));
  return p;
}

ProcurementSolution solve(const ConicProgram& program, std::size_t bids, const SolverSettings& settings) {
  if (static_cast<std::size_t>(program.variables()) != 2 * bids) {
    throw ParameterError("program size does not match 2 x bids");
  }
  const ConicSolution raw = solve_conic(program, settings);
  ProcurementSolution sol;
  const auto z = static_cast<Eigen::Index>(bids);
  sol.status = raw.status;
  if (raw.v.size() == 2 * z) {
    sol.x = raw.v.head(z);
    sol.y = raw.v.tail(z);
  } else {
    sol.x = Eigen::VectorXd::Zero(z);
    sol.y = Eigen::VectorXd::Zero(z);
  }
  sol.objective = raw.objective;
  sol.residuals = raw.slacks;
  sol.duality_gap = raw.duality_gap;
  sol.relative_gap = raw.relative_gap;
  sol.primal_residual = raw.primal_residual;
  sol.stationarity_residual = raw.stationarity_residual;
  sol.newton_steps = raw.newton_steps;
  sol.message = raw.message;
  return sol;
}

ProcurementSolution solve_procurement(const ProcurementSpec& spec, const PceMatrix& pce,
                                      const QuantilePair& lambda, const SolverSettings& settings) {
  return solve(assemble(spec, pce, lambda), spec.bids(), settings);
}

std::array<ConstraintMargin, 4> analytic_quantile_check(const ProcurementSolution& solution,
                                                        const PceMatrix& pce,
                                                        const ProcurementSpec& spec,
                                                        const QuantilePair& lambda) {
  std::array<ConstraintMargin, 4> report{};
  for (std::size_t i = 0; i < kAllConstraints.size(); ++i) {
    const ConstraintId id = kAllConstraints[i];
    const Eigen::VectorXd w = constraint_weights(id, spec, solution.x, solution.y);
    ConstraintMargin& m = report[i];
    m.id = id;
    m.mean = pce.a0.dot(w);
    m.sigma = (pce.A * w).norm();
    m.bound = constraint_bound(id, spec);
    if (is_lower_bound(id)) {
      m.quantile = m.mean + lambda.lambda_lo * m.sigma;
      m.margin = m.quantile - m.bound;
    } else {
      m.quantile = m.mean + lambda.lambda_hi * m.sigma;
      m.margin = m.bound - m.quantile;
    }
    m.active = m.margin <= kActiveTolerance * std::max(m.bound, 1.0);
  }
  return report;
}

}  // namespace cpce
