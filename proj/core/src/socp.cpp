#include "cpce/socp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cpce/errors.hpp"

namespace cpce {

namespace {

constexpr double kLineSearchAlpha = 0.01;
constexpr double kLineSearchBeta = 0.5;

// Barrier for G w <= h and ||A_k w + b_k|| <= f_k^T w + d_k.
class LogBarrier {
 public:
  LogBarrier(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const std::vector<SocConstraint>& cones)
      : G_(G), h_(h), cones_(cones) {}

  double parameter() const {
    return static_cast<double>(G_.rows()) + 2.0 * static_cast<double>(cones_.size());
  }

  bool strictly_feasible(const Eigen::VectorXd& w) const {
    if (G_.rows() > 0 && ((h_ - G_ * w).array() <= 0.0).any()) return false;
    for (const auto& cone : cones_) {
      const double u = cone.f.dot(w) + cone.d;
      if (!(u > 0.0) || !(u * u - (cone.A * w + cone.b).squaredNorm() > 0.0)) return false;
    }
    return true;
  }

  double value(const Eigen::VectorXd& w) const {
    double v = 0.0;
    if (G_.rows() > 0) v -= (h_ - G_ * w).array().log().sum();
    for (const auto& cone : cones_) {
      const double u = cone.f.dot(w) + cone.d;
      v -= std::log(u * u - (cone.A * w + cone.b).squaredNorm());
    }
    return v;
  }

  void derivatives(const Eigen::VectorXd& w, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    const Eigen::Index n = w.size();
    grad.setZero(n);
    hess.setZero(n, n);
    if (G_.rows() > 0) {
      const Eigen::VectorXd inv = (h_ - G_ * w).cwiseInverse();
      grad += G_.transpose() * inv;
      hess += G_.transpose() * inv.cwiseAbs2().asDiagonal() * G_;
    }
    for (const auto& cone : cones_) {
      const double u = cone.f.dot(w) + cone.d;
      const Eigen::VectorXd r = cone.A * w + cone.b;
      const double psi = u * u - r.squaredNorm();
      const Eigen::VectorXd dpsi = 2.0 * u * cone.f - 2.0 * cone.A.transpose() * r;
      grad -= dpsi / psi;
      hess += dpsi * dpsi.transpose() / (psi * psi);
      hess -= (2.0 * cone.f * cone.f.transpose() - 2.0 * cone.A.transpose() * cone.A) / psi;
    }
  }

 private:
  const Eigen::MatrixXd& G_;
  const Eigen::VectorXd& h_;
  const std::vector<SocConstraint>& cones_;
};

struct CenteringResult {
  int steps = 0;
  bool ok = true;
};

// Solves H delta = -g. Near the end of the path H mixes entries of order one
// with entries of order 1/slack^2, so the system is equilibrated by its
// diagonal first; a tiny ridge rescues Hessians that are singular to rounding.
bool newton_direction(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad, Eigen::VectorXd& delta) {
  const Eigen::VectorXd scale =
      hess.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd scaled = scale.asDiagonal() * hess * scale.asDiagonal();
  const Eigen::VectorXd rhs = -scale.cwiseProduct(grad);
  Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() == Eigen::Success) {
    delta = scale.cwiseProduct(llt.solve(rhs));
    if (delta.allFinite()) return true;
  }
  scaled.diagonal().array() += 1e-12;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
  if (ldlt.info() != Eigen::Success) return false;
  delta = scale.cwiseProduct(ldlt.solve(rhs));
  return delta.allFinite();
}

// Newton's method on t c^T w + barrier(w) from a strictly feasible w. `stop` is
// checked after every step and ends the centering early when it returns true.
//
// Once the Newton decrement is small the iterate is in the quadratic region of
// the self-concordant objective and full steps are taken without the Armijo
// test, which cannot resolve decreases below the rounding level of t c^T w.
// Iteration then continues until the decrement stops shrinking.
template <class Stop>
CenteringResult center(const LogBarrier& barrier, const Eigen::VectorXd& c, double t,
                       Eigen::VectorXd& w, const SolverSettings& settings, Stop&& stop) {
  CenteringResult result;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  Eigen::VectorXd delta;
  double previous = std::numeric_limits<double>::infinity();
  for (int step = 0; step < settings.max_newton_steps; ++step) {
    barrier.derivatives(w, grad, hess);
    grad += t * c;
    if (!newton_direction(hess, grad, delta)) {
      result.ok = false;
      return result;
    }
    const double decrement = -grad.dot(delta);
    if (decrement / 2.0 <= settings.newton_tolerance) return result;

    if (decrement < 0.1) {
      if (decrement > 0.25 * previous) return result;  // stagnated at rounding level
      previous = decrement;
      if (barrier.strictly_feasible(w + delta)) {
        w += delta;
        ++result.steps;
        if (stop(w)) return result;
        continue;
      }
    }

    double alpha = 1.0;
    while (alpha > 1e-14 && !barrier.strictly_feasible(w + alpha * delta)) alpha *= kLineSearchBeta;
    const double f0 = t * c.dot(w) + barrier.value(w);
    while (alpha > 1e-14) {
      const Eigen::VectorXd trial = w + alpha * delta;
      const double f1 = t * c.dot(trial) + barrier.value(trial);
      if (f1 <= f0 - kLineSearchAlpha * alpha * decrement) break;
      alpha *= kLineSearchBeta;
    }
    if (alpha <= 1e-14) return result;  // no further progress at this precision
    w += alpha * delta;
    ++result.steps;
    if (stop(w)) return result;
  }
  return result;
}

// Lawson-Hanson active-set solve of min ||E x - f|| subject to x >= 0.
Eigen::VectorXd nonnegative_least_squares(const Eigen::MatrixXd& E, const Eigen::VectorXd& f) {
  const Eigen::Index m = E.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const double tol = 1e-12 * std::max(1.0, E.cwiseAbs().maxCoeff() * f.cwiseAbs().maxCoeff());
  auto solve_passive = [&] {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    Eigen::MatrixXd Ep(E.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ep.col(static_cast<Eigen::Index>(k)) = E.col(idx[k]);
    const Eigen::VectorXd zp = Ep.colPivHouseholderQr().solve(f);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];
    return z;
  };
  for (int outer = 0; outer < 3 * m + 3; ++outer) {
    const Eigen::VectorXd w = E.transpose() * (f - E * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > tol && (best < 0 || w[j] > w[best])) best = j;
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner <= m; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      }
      x += alpha * (z - x);
      if (alpha >= 1.0) break;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= 0.0) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  return x;
}

// Max-norm KKT stationarity residual at v. Two nonnegative multiplier
// estimates are tried: the central-path duals 1/(t s), whose accuracy is
// limited by the rounding error of tiny slacks once t is large, and a
// nonnegative least-squares fit over the constraints the central path marks as
// active (slack no larger than its dual). The smaller residual is reported.
double stationarity_residual(const ConicProgram& p, const Eigen::VectorXd& v, double t) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::VectorXd> gradients;
  std::vector<double> duals;
  std::vector<double> slacks;
  for (Eigen::Index i = 0; i < p.G.rows(); ++i) {
    const double s = p.h[i] - p.G.row(i).dot(v);
    gradients.push_back(p.G.row(i).transpose());
    duals.push_back(1.0 / (t * s));
    slacks.push_back(s);
  }
  for (const auto& cone : p.cones) {
    const double u = cone.f.dot(v) + cone.d;
    const Eigen::VectorXd r = cone.A * v + cone.b;
    const double norm = r.norm();
    const double psi = u * u - r.squaredNorm();
    // Gradient of ||A v + b|| - f^T v - d; the multiplier 2u/(t psi) reproduces
    // the barrier's own dual pair (z0, z1) when u = ||r||.
    Eigen::VectorXd g = -cone.f;
    if (norm > 0.0) g += cone.A.transpose() * r / norm;
    gradients.push_back(g);
    duals.push_back(2.0 * u / (t * psi));
    slacks.push_back(u - norm);
  }

  Eigen::VectorXd central = p.c;
  for (std::size_t j = 0; j < gradients.size(); ++j) central += duals[j] * gradients[j];
  double best = central.cwiseAbs().maxCoeff();

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < gradients.size(); ++j) {
    if (slacks[j] <= duals[j]) active.push_back(j);
  }
  if (!active.empty()) {
    Eigen::MatrixXd E(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) E.col(static_cast<Eigen::Index>(k)) = gradients[active[k]];
    const Eigen::VectorXd mu = nonnegative_least_squares(E, -p.c);
    best = std::min(best, (p.c + E * mu).cwiseAbs().maxCoeff());
  }
  return best;
}

std::vector<double> constraint_slacks(const ConicProgram& p, const Eigen::VectorXd& v) {
  std::vector<double> slacks;
  if (p.G.rows() > 0) {
    const Eigen::VectorXd s = p.h - p.G * v;
    slacks.assign(s.data(), s.data() + s.size());
  }
  for (const auto& cone : p.cones) {
    slacks.push_back(cone.f.dot(v) + cone.d - (cone.A * v + cone.b).norm());
  }
  return slacks;
}

std::string constraint_name(const ConicProgram& p, std::size_t i) {
  const auto rows = static_cast<std::size_t>(p.G.rows());
  if (i < rows) {
    return i < p.linear_names.size() ? p.linear_names[i] : "linear[" + std::to_string(i) + "]";
  }
  const auto& cone = p.cones[i - rows];
  return cone.name.empty() ? "cone[" + std::to_string(i - rows) + "]" : cone.name;
}

}  // namespace

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

void ConicProgram::check() const {
  const Eigen::Index n = c.size();
  if (n == 0) throw ParameterError("conic program has no variables");
  if (G.rows() != h.size() || (G.rows() > 0 && G.cols() != n)) {
    throw ParameterError("linear constraint block has inconsistent dimensions");
  }
  for (const auto& cone : cones) {
    if (cone.A.cols() != n || cone.A.rows() != cone.b.size() || cone.f.size() != n) {
      throw ParameterError("cone '" + cone.name + "' has inconsistent dimensions");
    }
  }
}

ConicSolution solve_conic(const ConicProgram& program, const SolverSettings& settings) {
  program.check();
  const Eigen::Index n = program.variables();
  ConicSolution out;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);

  const LogBarrier barrier(program.G, program.h, program.cones);
  if (!barrier.strictly_feasible(v)) {
    // Phase I: minimize s over (v, s) with every constraint relaxed by s, s >= -1.
    const Eigen::Index rows = program.G.rows();
    Eigen::MatrixXd G1 = Eigen::MatrixXd::Zero(rows + 1, n + 1);
    Eigen::VectorXd h1(rows + 1);
    G1.topLeftCorner(rows, n) = program.G;
    G1.block(0, n, rows, 1).setConstant(-1.0);
    h1.head(rows) = program.h;
    G1(rows, n) = -1.0;
    h1[rows] = 1.0;
    std::vector<SocConstraint> cones1;
    for (const auto& cone : program.cones) {
      SocConstraint relaxed;
      relaxed.name = cone.name;
      relaxed.A = Eigen::MatrixXd::Zero(cone.A.rows(), n + 1);
      relaxed.A.leftCols(n) = cone.A;
      relaxed.b = cone.b;
      relaxed.f = Eigen::VectorXd::Zero(n + 1);
      relaxed.f.head(n) = cone.f;
      relaxed.f[n] = 1.0;
      relaxed.d = cone.d;
      cones1.push_back(std::move(relaxed));
    }
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + 1);
    c1[n] = 1.0;

    double worst = 0.0;
    for (double s : constraint_slacks(program, v)) worst = std::max(worst, -s);
    Eigen::VectorXd w(n + 1);
    w.head(n) = v;
    w[n] = worst + 1.0;

    const LogBarrier barrier1(G1, h1, cones1);
    const double theta1 = barrier1.parameter();
    auto found = [n](const Eigen::VectorXd& x) { return x[n] < 0.0; };
    bool feasible = false;
    double t = 1.0;
    for (int outer = 0; outer < settings.max_outer_iterations; ++outer) {
      const CenteringResult r = center(barrier1, c1, t, w, settings, found);
      out.newton_steps += r.steps;
      if (!r.ok) {
        out.status = SolveStatus::numerical_failure;
        out.message = "phase I Newton system could not be solved";
        return out;
      }
      if (found(w)) {
        feasible = true;
        break;
      }
      if (w[n] - theta1 / t > 0.0 || theta1 / t < 1e-12) break;
      t *= settings.barrier_growth;
    }
    if (!feasible) {
      v = w.head(n);
      const auto slacks = constraint_slacks(program, v);
      std::size_t worst_index = 0;
      for (std::size_t i = 1; i < slacks.size(); ++i) {
        if (slacks[i] < slacks[worst_index]) worst_index = i;
      }
      std::ostringstream msg;
      msg << "no strictly feasible point (phase I optimum " << w[n] << "); most violated constraint: "
          << constraint_name(program, worst_index);
      out.status = SolveStatus::infeasible;
      out.v = v;
      out.slacks = slacks;
      out.message = msg.str();
      return out;
    }
    v = w.head(n);
  }

  // Phase II: follow the central path until barrier parameter / t is below the gap target.
  const double theta = barrier.parameter();
  double t = 1.0;
  auto never = [](const Eigen::VectorXd&) { return false; };
  for (int outer = 0;; ++outer) {
    const CenteringResult r = center(barrier, program.c, t, v, settings, never);
    out.newton_steps += r.steps;
    if (!r.ok) {
      out.status = SolveStatus::numerical_failure;
      out.message = "phase II Newton system could not be solved";
      out.v = v;
      return out;
    }
    const double objective = program.c.dot(v);
    if (theta / t <= settings.gap_tolerance * std::max(1.0, std::fabs(objective))) break;
    if (outer + 1 >= settings.max_outer_iterations) {
      out.status = SolveStatus::numerical_failure;
      out.message = "barrier method did not reach the gap tolerance";
      out.v = v;
      return out;
    }
    t *= settings.barrier_growth;
  }

  out.status = SolveStatus::optimal;
  out.v = v;
  out.objective = program.c.dot(v);
  out.duality_gap = theta / t;
  out.relative_gap = out.duality_gap / std::max(1.0, std::fabs(out.objective));
  out.slacks = constraint_slacks(program, v);
  for (double s : out.slacks) out.primal_residual = std::max(out.primal_residual, -s);

  out.stationarity_residual = stationarity_residual(program, v, t);
  return out;
}

}  // namespace cpce
