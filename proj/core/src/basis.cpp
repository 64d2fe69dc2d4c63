#include "cpce/basis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cpce/errors.hpp"
#include "cpce/parallel.hpp"

namespace cpce {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

std::string exponents_string(const Exponents& e) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < e.size(); ++i) out << (i ? "," : "") << e[i];
  out << "]";
  return out.str();
}

void enumerate_degree(std::size_t d, int degree, Exponents& current, std::size_t pos,
                      std::vector<Exponents>& out) {
  if (pos + 1 == d) {
    current[pos] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[pos] = e;
    enumerate_degree(d, degree - e, current, pos + 1, out);
  }
  current[pos] = 0;
}

}  // namespace

Monomial::Monomial(Exponents exponents) : exponents_(std::move(exponents)) {
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] < 0) throw ParameterError("monomial exponents must be nonnegative");
    degree_ += exponents_[i];
    if (exponents_[i] > 0) support_.push_back(i);
  }
}

double Monomial::evaluate(std::span<const double> xi) const {
  double value = 1.0;
  for (Index i : support_) value *= ipow(xi[i], exponents_[i]);
  return value;
}

std::string Monomial::to_string() const {
  if (support_.empty()) return "1";
  std::ostringstream out;
  bool first = true;
  for (Index i : support_) {
    out << (first ? "" : "*") << "x" << i;
    if (exponents_[i] > 1) out << "^" << exponents_[i];
    first = false;
  }
  return out.str();
}

Exponents add_exponents(const Exponents& a, const Exponents& b) {
  if (a.size() != b.size()) throw ParameterError("exponent vectors differ in length");
  Exponents sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];
  return sum;
}

std::vector<Index> support_of(const Exponents& e) {
  std::vector<Index> s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] != 0) s.push_back(i);
  }
  return s;
}

bool MonomialFilter::accepts(const Exponents& e) const {
  if (groups.empty()) return true;
  int degree = 0;
  for (int v : e) degree += v;
  if (degree <= 1) return true;
  if (std::find(whitelist.begin(), whitelist.end(), e) != whitelist.end()) return true;

  const std::vector<Index> support = support_of(e);
  if (support.size() > 1 && !keep_within_group_cross) return false;
  // Ungrouped variables behave as singleton groups.
  auto group_of = [this](Index v) -> std::ptrdiff_t {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (std::find(groups[g].begin(), groups[g].end(), v) != groups[g].end()) {
        return static_cast<std::ptrdiff_t>(g);
      }
    }
    return -1 - static_cast<std::ptrdiff_t>(v);
  };
  const std::ptrdiff_t first = group_of(support.front());
  return std::all_of(support.begin(), support.end(),
                     [&](Index v) { return group_of(v) == first; });
}

std::vector<Monomial> generate_monomials(std::size_t d, int max_degree, const MonomialFilter& filter) {
  if (d == 0) throw ConfigurationError("monomial set needs at least one variable");
  if (max_degree < 0) throw ConfigurationError("maximum monomial degree must be nonnegative");
  for (const auto& w : filter.whitelist) {
    if (w.size() != d) throw ConfigurationError("whitelisted exponent vector has wrong length");
  }
  std::vector<Monomial> set;
  for (int degree = 0; degree <= max_degree; ++degree) {
    std::vector<Exponents> level;
    Exponents current(d, 0);
    enumerate_degree(d, degree, current, 0, level);
    for (auto& e : level) {
      if (filter.accepts(e)) set.emplace_back(std::move(e));
    }
  }
  if (set.empty()) throw ConfigurationError("monomial filter left an empty set");
  return set;
}

MomentTable::MomentTable(std::size_t dim) : dim_(dim) {
  if (dim_ > 0) values_.emplace(Exponents(dim_, 0), 1.0);
}

double MomentTable::at(const Exponents& e) const {
  auto it = values_.find(e);
  if (it == values_.end()) {
    throw Error(ErrorKind::internal, "moment table has no entry for " + exponents_string(e));
  }
  return it->second;
}

void MomentTable::insert(const Exponents& e, double value) {
  if (e.size() != dim_) throw ParameterError("moment table key has wrong length");
  values_[e] = value;
}

void fill_moments(MomentTable& table, std::span<const Exponents> needed, const JointModel& model,
                  int k, const IntegrationOptions& options) {
  std::map<std::vector<Index>, std::vector<Exponents>> by_support;
  std::set<Exponents> pending;
  for (const auto& e : needed) {
    if (e.size() != model.dim()) throw ParameterError("exponent vector does not match model dimension");
    if (table.contains(e) || !pending.insert(e).second) continue;
    by_support[support_of(e)].push_back(e);
  }
  for (const auto& [support, members] : by_support) {
    const std::uint64_t n = tensor_size(static_cast<std::size_t>(k), support.size());
    if (n > options.node_budget) {
      std::ostringstream msg;
      msg << "moment E[x^" << exponents_string(members.front()) << "] needs a "
          << support.size() << "-dimensional grid of " << n << " nodes at k = " << k
          << ", exceeding the node budget of " << options.node_budget;
      throw ResourceError(msg.str());
    }
  }

  std::vector<const std::pair<const std::vector<Index>, std::vector<Exponents>>*> groups;
  for (const auto& entry : by_support) groups.push_back(&entry);
  std::vector<std::vector<double>> results(groups.size());

  // Groups run concurrently; each integral is single-threaded so the per-node
  // summation order never changes.
  IntegrationOptions inner = options;
  inner.threads = 1;
  parallel_for(groups.size(), options.threads, [&](std::size_t g) {
    const auto& support = groups[g]->first;
    const auto& members = groups[g]->second;
    MultiIntegrand integrand = [&](std::span<const double> xi, std::span<double> out) {
      for (std::size_t m = 0; m < members.size(); ++m) {
        double value = 1.0;
        for (std::size_t p = 0; p < support.size(); ++p) value *= ipow(xi[p], members[m][support[p]]);
        out[m] = value;
      }
    };
    results[g] = integrate_copula_many(integrand, members.size(), support, model, k, inner);
  });

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& members = groups[g]->second;
    for (std::size_t m = 0; m < members.size(); ++m) table.insert(members[m], results[g][m]);
  }
}

MomentTable moment_table(std::span<const Monomial> set, const JointModel& model, int k,
                         const IntegrationOptions& options) {
  MomentTable table(model.dim());
  std::vector<Exponents> needed;
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = a; b < set.size(); ++b) {
      needed.push_back(add_exponents(set[a].exponents(), set[b].exponents()));
    }
  }
  fill_moments(table, needed, model, k, options);
  return table;
}

Eigen::MatrixXd gram_matrix(std::span<const Monomial> set, const MomentTable& table) {
  const auto m = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double v = table.at(add_exponents(set[a].exponents(), set[b].exponents()));
      gram(a, b) = v;
      gram(b, a) = v;
    }
  }
  return gram;
}

OrthonormalBasis orthonormalize(const Eigen::MatrixXd& gram, std::vector<Monomial> set,
                                const OrthonormalizeOptions& options) {
  const Eigen::Index m = gram.rows();
  if (gram.cols() != m || static_cast<std::size_t>(m) != set.size() || m == 0) {
    throw ParameterError("Gram matrix size does not match the monomial set");
  }

  // Cholesky with explicit pivot check so a breakdown names the offending monomial.
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double pivot = gram(j, j);
    for (Eigen::Index p = 0; p < j; ++p) pivot -= lower(j, p) * lower(j, p);
    if (!(pivot > options.min_eigenvalue * gram(j, j)) || !std::isfinite(pivot)) {
      std::ostringstream msg;
      msg << "Gram matrix Cholesky failed at pivot " << j << " (monomial "
          << set[static_cast<std::size_t>(j)].to_string()
          << "): monomial is numerically dependent on the preceding ones";
      throw IllConditionedBasisError(msg.str(), static_cast<std::size_t>(j));
    }
    lower(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < m; ++i) {
      double v = gram(i, j);
      for (Eigen::Index p = 0; p < j; ++p) v -= lower(i, p) * lower(j, p);
      lower(i, j) = v / lower(j, j);
    }
  }

  OrthonormalBasis basis;
  basis.monomials = std::move(set);
  basis.coeffs = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(m, m));
  basis.coeffs.triangularView<Eigen::StrictlyUpper>().setZero();
  basis.gram_residual =
      (basis.coeffs * gram * basis.coeffs.transpose() - Eigen::MatrixXd::Identity(m, m))
          .cwiseAbs()
          .maxCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> raw(gram, Eigen::EigenvaluesOnly);
  basis.condition = raw.eigenvalues().maxCoeff() / raw.eigenvalues().minCoeff();
  const Eigen::VectorXd scale = gram.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd equilibrated = scale.asDiagonal() * gram * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(equilibrated, Eigen::EigenvaluesOnly);
  const double eq_min = eq.eigenvalues().minCoeff();
  basis.scaled_condition = eq.eigenvalues().maxCoeff() / eq_min;

  if (options.enforce_condition &&
      (!(eq_min > options.min_eigenvalue) || basis.scaled_condition > options.max_condition)) {
    // Point at the pivot that lost the most relative mass.
    Eigen::Index worst = 0;
    double worst_ratio = 1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double ratio = lower(j, j) * lower(j, j) / gram(j, j);
      if (ratio < worst_ratio) {
        worst_ratio = ratio;
        worst = j;
      }
    }
    std::ostringstream msg;
    msg << "Gram matrix condition " << basis.scaled_condition << " exceeds the limit "
        << options.max_condition << "; weakest pivot " << worst << " (monomial "
        << basis.monomials[static_cast<std::size_t>(worst)].to_string() << ")";
    throw IllConditionedBasisError(msg.str(), static_cast<std::size_t>(worst));
  }
  return basis;
}

Eigen::VectorXd evaluate_monomials(std::span<const Monomial> set, std::span<const double> xi) {
  Eigen::VectorXd values(static_cast<Eigen::Index>(set.size()));
  for (std::size_t j = 0; j < set.size(); ++j) values[static_cast<Eigen::Index>(j)] = set[j].evaluate(xi);
  return values;
}

Eigen::VectorXd evaluate_basis(const OrthonormalBasis& basis, std::span<const double> xi) {
  if (xi.size() != basis.dim()) throw ParameterError("evaluate_basis: point dimension mismatch");
  return basis.coeffs.triangularView<Eigen::Lower>() * evaluate_monomials(basis.monomials, xi);
}

}  // namespace cpce
