#include "cpce/copula.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "cpce/errors.hpp"
#include "cpce/parallel.hpp"
#include "cpce/rng.hpp"

namespace cpce {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kDiagonalTol = 1e-12;
constexpr std::size_t kSampleBlock = 4096;

void check_dims(std::span<const Index> dims, std::size_t dim) {
  std::set<Index> seen;
  for (Index i : dims) {
    if (i >= dim) {
      std::ostringstream msg;
      msg << "variable index " << i << " out of range for dimension " << dim;
      throw ParameterError(msg.str());
    }
    if (!seen.insert(i).second) {
      std::ostringstream msg;
      msg << "variable index " << i << " listed twice";
      throw ParameterError(msg.str());
    }
  }
}

RowMatrix draw(const JointModel& model, const Eigen::MatrixXd& chol, std::size_t n,
               std::uint64_t seed, const SampleOptions& options) {
  const std::size_t d = model.dim();
  RowMatrix out(n, d);
  const CounterRng rng(seed);
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_for(blocks, options.threads, [&](std::size_t b) {
    Eigen::VectorXd z(d);
    const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
    for (std::size_t r = b * kSampleBlock; r < end; ++r) {
      for (std::size_t j = 0; j < d; ++j) z[j] = rng.normal(r * d + j);
      const Eigen::VectorXd y = chol.triangularView<Eigen::Lower>() * z;
      for (std::size_t j = 0; j < d; ++j) out(r, j) = model.marginal(j).from_latent(y[j]);
    }
  });
  return out;
}

}  // namespace

GaussianCopula::GaussianCopula(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw ValidationError("correlation matrix must be square and non-empty");
  }
  const Eigen::Index d = sigma.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!std::isfinite(sigma(i, i)) || std::fabs(sigma(i, i) - 1.0) > kDiagonalTol) {
      std::ostringstream msg;
      msg << "correlation matrix diagonal entry (" << i << "," << i << ") = " << sigma(i, i)
          << ", expected 1";
      throw ValidationError(msg.str());
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      if (!std::isfinite(sigma(i, j)) || std::fabs(sigma(i, j) - sigma(j, i)) > kSymmetryTol) {
        std::ostringstream msg;
        msg << "correlation matrix is not symmetric at (" << i << "," << j << ")";
        throw ValidationError(msg.str());
      }
    }
  }
  sigma_ = 0.5 * (sigma + sigma.transpose());
  sigma_.diagonal().setOnes();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_, Eigen::EigenvaluesOnly);
  min_eigenvalue_ = eig.eigenvalues().minCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
  if (llt.info() != Eigen::Success || !(min_eigenvalue_ > 0.0)) {
    std::ostringstream msg;
    msg << "correlation matrix is not positive definite (smallest eigenvalue " << min_eigenvalue_
        << ")";
    throw NotPositiveDefiniteError(msg.str(), min_eigenvalue_);
  }
  chol_ = llt.matrixL();
}

GaussianCopula GaussianCopula::identity(std::size_t dim) {
  return GaussianCopula(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                                  static_cast<Eigen::Index>(dim)));
}

double GaussianCopula::density(std::span<const double> u) const {
  if (u.size() != dim()) throw ParameterError("copula density: point dimension mismatch");
  Eigen::VectorXd z(static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0)) {
      throw DomainError("copula density requires every u_i strictly inside (0, 1)");
    }
    z[static_cast<Eigen::Index>(i)] = std_normal_inv_cdf(u[i]);
  }
  const Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>().solve(z);
  const double log_det_half = chol_.diagonal().array().log().sum();
  return std::exp(-0.5 * (w.squaredNorm() - z.squaredNorm()) - log_det_half);
}

GaussianCopula GaussianCopula::marginalize(std::span<const Index> dims) const {
  check_dims(dims, dim());
  const auto m = static_cast<Eigen::Index>(dims.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      sub(i, j) = sigma_(static_cast<Eigen::Index>(dims[i]), static_cast<Eigen::Index>(dims[j]));
    }
  }
  return GaussianCopula(sub);
}

bool GaussianCopula::is_identity() const { return sigma_.isIdentity(0.0); }

JointModel::JointModel(GaussianCopula copula, std::vector<Marginal> marginals)
    : copula_(std::move(copula)), marginals_(std::move(marginals)) {
  if (marginals_.size() != copula_.dim()) {
    std::ostringstream msg;
    msg << "joint model has " << marginals_.size() << " marginals for a " << copula_.dim()
        << "-dimensional copula";
    throw ValidationError(msg.str());
  }
}

JointModel JointModel::marginalize(std::span<const Index> dims) const {
  std::vector<Marginal> sub;
  sub.reserve(dims.size());
  GaussianCopula c = copula_.marginalize(dims);
  for (Index i : dims) sub.push_back(marginals_[i]);
  return JointModel(std::move(c), std::move(sub));
}

JointModel JointModel::independent() const {
  return JointModel(GaussianCopula::identity(dim()), marginals_);
}

RowMatrix sample(const JointModel& model, std::size_t n, std::uint64_t seed,
                 const SampleOptions& options) {
  return draw(model, model.copula().chol(), n, seed, options);
}

RowMatrix sample_independent(const JointModel& model, std::size_t n, std::uint64_t seed,
                             const SampleOptions& options) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  return draw(model, Eigen::MatrixXd::Identity(d, d), n, seed, options);
}

RowMatrix sample_latent(std::size_t dim, std::size_t n, std::uint64_t seed,
                        const SampleOptions& options) {
  RowMatrix out(n, dim);
  const CounterRng rng(seed);
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_for(blocks, options.threads, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
    for (std::size_t r = b * kSampleBlock; r < end; ++r) {
      for (std::size_t j = 0; j < dim; ++j) out(r, j) = rng.normal(r * dim + j);
    }
  });
  return out;
}

}  // namespace cpce
