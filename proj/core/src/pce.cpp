#include "cpce/pce.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cpce/errors.hpp"
#include "cpce/parallel.hpp"

namespace cpce {

namespace {

constexpr double kRelativeErrorFloor = 1e-12;

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

const char* to_string(Zone zone) noexcept { return zone == Zone::X ? "X" : "Y"; }

BidFunction::BidFunction(std::string id, std::vector<PolyTerm> terms, Zone zone, double cost)
    : id_(std::move(id)), terms_(std::move(terms)), zone_(zone), cost_(cost) {
  if (terms_.empty()) throw ValidationError("bid '" + id_ + "' has no terms");
  if (!(cost_ >= 0.0) || !std::isfinite(cost_)) {
    throw ValidationError("bid '" + id_ + "' needs a finite cost >= 0");
  }
  std::set<Index> support;
  for (auto& term : terms_) {
    if (!std::isfinite(term.coef)) throw ValidationError("bid '" + id_ + "' has a non-finite coefficient");
    std::sort(term.powers.begin(), term.powers.end());
    int degree = 0;
    for (std::size_t p = 0; p < term.powers.size(); ++p) {
      const auto [index, power] = term.powers[p];
      if (power < 1) throw ValidationError("bid '" + id_ + "' has a power below 1");
      if (p > 0 && term.powers[p - 1].first == index) {
        throw ValidationError("bid '" + id_ + "' repeats a variable inside one term");
      }
      degree += power;
      if (term.coef != 0.0) support.insert(index);
      min_dim_ = std::max(min_dim_, index + 1);
    }
    degree_ = std::max(degree_, degree);
  }
  support_.assign(support.begin(), support.end());
}

double BidFunction::evaluate(std::span<const double> xi) const {
  double total = 0.0;
  for (const auto& term : terms_) {
    double value = term.coef;
    for (const auto& [index, power] : term.powers) value *= ipow(xi[index], power);
    total += value;
  }
  return total;
}

std::vector<std::pair<double, Exponents>> BidFunction::dense_terms(std::size_t d) const {
  if (d < min_dim_) {
    std::ostringstream msg;
    msg << "bid '" << id_ << "' references variable " << min_dim_ - 1 << " in a " << d
        << "-dimensional model";
    throw ParameterError(msg.str());
  }
  std::vector<std::pair<double, Exponents>> dense;
  for (const auto& term : terms_) {
    Exponents e(d, 0);
    for (const auto& [index, power] : term.powers) e[index] = power;
    dense.emplace_back(term.coef, std::move(e));
  }
  return dense;
}

Eigen::VectorXd PceMatrix::column(std::size_t j) const {
  Eigen::VectorXd full(A.rows() + 1);
  full[0] = a0[static_cast<Eigen::Index>(j)];
  full.tail(A.rows()) = A.col(static_cast<Eigen::Index>(j));
  return full;
}

PceMatrix make_pce_matrix(std::span<const Eigen::VectorXd> coefficients, std::string basis_ref) {
  if (coefficients.empty()) throw ParameterError("no coefficient vectors");
  const Eigen::Index m = coefficients.front().size();
  if (m < 1) throw ParameterError("empty coefficient vector");
  PceMatrix pce;
  pce.basis_ref = std::move(basis_ref);
  pce.a0.resize(static_cast<Eigen::Index>(coefficients.size()));
  pce.A.resize(m - 1, static_cast<Eigen::Index>(coefficients.size()));
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    if (coefficients[j].size() != m) throw ParameterError("coefficient vectors differ in length");
    const auto col = static_cast<Eigen::Index>(j);
    pce.a0[col] = coefficients[j][0];
    pce.A.col(col) = coefficients[j].tail(m - 1);
  }
  return pce;
}

int default_projection_order(int bid_degree, int max_monomial_degree) {
  return (bid_degree + max_monomial_degree + 1) / 2 + 1;
}

Eigen::VectorXd expand(const BidFunction& q, const OrthonormalBasis& basis, const JointModel& model,
                       int k, const ExpandOptions& options, MomentTable* moments) {
  const std::size_t d = model.dim();
  if (basis.dim() != d) throw ParameterError("basis and model dimensions differ");
  const auto terms = q.dense_terms(d);
  const std::size_t m = basis.size();
  Eigen::VectorXd projections(static_cast<Eigen::Index>(m));

  if (options.mode == ProjectionMode::moments) {
    MomentTable local(d);
    MomentTable& table = moments ? *moments : local;
    if (table.dim() != d) throw ParameterError("moment table dimension differs from the model");
    std::vector<Exponents> needed;
    for (const auto& mono : basis.monomials) {
      for (const auto& [coef, e] : terms) needed.push_back(add_exponents(e, mono.exponents()));
    }
    fill_moments(table, needed, model, k, options.integration);
    for (std::size_t j = 0; j < m; ++j) {
      double value = 0.0;
      for (const auto& [coef, e] : terms) {
        value += coef * table.at(add_exponents(e, basis.monomials[j].exponents()));
      }
      projections[static_cast<Eigen::Index>(j)] = value;
    }
  } else {
    // Group monomials by the union support they form with q.
    std::map<std::vector<Index>, std::vector<std::size_t>> by_dims;
    for (std::size_t j = 0; j < m; ++j) {
      std::set<Index> dims(q.support().begin(), q.support().end());
      dims.insert(basis.monomials[j].support().begin(), basis.monomials[j].support().end());
      by_dims[std::vector<Index>(dims.begin(), dims.end())].push_back(j);
    }
    for (const auto& [dims, members] : by_dims) {
      MultiIntegrand integrand = [&](std::span<const double> sub, std::span<double> out) {
        std::vector<double> xi(d, 0.0);
        for (std::size_t p = 0; p < dims.size(); ++p) xi[dims[p]] = sub[p];
        const double qv = q.evaluate(xi);
        for (std::size_t i = 0; i < members.size(); ++i) {
          out[i] = qv * basis.monomials[members[i]].evaluate(xi);
        }
      };
      const auto values =
          integrate_copula_many(integrand, members.size(), dims, model, k, options.integration);
      for (std::size_t i = 0; i < members.size(); ++i) {
        projections[static_cast<Eigen::Index>(members[i])] = values[i];
      }
    }
  }
  for (Eigen::Index j = 0; j < projections.size(); ++j) {
    if (!std::isfinite(projections[j])) {
      throw EvaluationError("non-finite projection for bid '" + q.id() + "'", {});
    }
  }
  return basis.coeffs.triangularView<Eigen::Lower>() * projections;
}

OutputMoments moments(const Eigen::VectorXd& coeffs) {
  if (coeffs.size() < 1) throw ParameterError("moments: empty coefficient vector");
  return {coeffs[0], coeffs.tail(coeffs.size() - 1).norm()};
}

Eigen::VectorXd combine(const Eigen::VectorXd& weights, const PceMatrix& pce) {
  if (static_cast<std::size_t>(weights.size()) != pce.bids()) {
    std::ostringstream msg;
    msg << "combine: " << weights.size() << " weights for " << pce.bids() << " bids";
    throw ParameterError(msg.str());
  }
  Eigen::VectorXd out(pce.A.rows() + 1);
  out[0] = pce.a0.dot(weights);
  out.tail(pce.A.rows()) = pce.A * weights;
  return out;
}

double evaluate_expansion(const Eigen::VectorXd& coeffs, const OrthonormalBasis& basis,
                          std::span<const double> xi) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.size()) {
    throw ParameterError("coefficient vector does not match the basis size");
  }
  return coeffs.dot(evaluate_basis(basis, xi));
}

double expansion_error(const BidFunction& q, const Eigen::VectorXd& coeffs,
                       const OrthonormalBasis& basis, const RowMatrix& samples) {
  double worst = 0.0;
  std::vector<double> xi(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) xi[static_cast<std::size_t>(c)] = samples(r, c);
    const double truth = q.evaluate(xi);
    const double approx = evaluate_expansion(coeffs, basis, xi);
    worst = std::max(worst, std::fabs(truth - approx) / std::max(std::fabs(truth), kRelativeErrorFloor));
  }
  return worst;
}

double expansion_error(const BidFunction& q, const Eigen::VectorXd& coeffs,
                       const OrthonormalBasis& basis, const JointModel& model, std::size_t n,
                       std::uint64_t seed) {
  if (n == 0) throw ParameterError("expansion_error needs at least one sample");
  return expansion_error(q, coeffs, basis, sample(model, n, seed));
}

}  // namespace cpce
