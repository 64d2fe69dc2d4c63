#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cpce/errors.hpp"
#include "cpce/pce.hpp"
#include "cpce/scenario.hpp"

using namespace cpce;

namespace {

OrthonormalBasis build(const Scenario& s, int k) {
  auto set = generate_monomials(s.dimension, s.monomials.max_degree, s.filter());
  const MomentTable t = moment_table(set, s.model(), k);
  const Eigen::MatrixXd g = gram_matrix(set, t);
  return orthonormalize(g, std::move(set));
}

struct Fixture2d {
  JointModel model;
  OrthonormalBasis basis;
};

// Two correlated variables with non-normal marginals and a full degree-2 basis.
Fixture2d beta_2d(double rho = 0.5) {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, rho, rho, 1.0;
  JointModel model(GaussianCopula(s), {Marginal::beta(2, 3, 0, 2), Marginal::uniform(-1, 1)});
  auto set = generate_monomials(2, 2);
  const MomentTable t = moment_table(set, model, 30);
  const Eigen::MatrixXd g = gram_matrix(set, t);
  return {model, orthonormalize(g, std::move(set))};
}

BidFunction poly(const std::string& id, std::vector<PolyTerm> terms) {
  return BidFunction(id, std::move(terms), Zone::X, 1.0);
}

}  // namespace

TEST(BidFunction, EvaluatesAndReportsShape) {
  const BidFunction q = poly("q", {{2.0, {}}, {3.0, {{0, 2}}}, {-1.0, {{0, 1}, {2, 1}}}});
  EXPECT_EQ(q.degree(), 2);
  EXPECT_EQ(q.min_dim(), 3u);
  EXPECT_EQ(q.support(), (std::vector<Index>{0, 2}));
  const std::vector<double> x{2.0, 7.0, 5.0};
  EXPECT_DOUBLE_EQ(q.evaluate(x), 2.0 + 12.0 - 10.0);
}

TEST(BidFunction, RejectsMalformedTerms) {
  EXPECT_THROW(poly("q", {}), ValidationError);
  EXPECT_THROW(poly("q", {{1.0, {{0, 0}}}}), ValidationError);
  EXPECT_THROW(poly("q", {{1.0, {{0, 1}, {0, 2}}}}), ValidationError);
  EXPECT_THROW(BidFunction("q", {{1.0, {}}}, Zone::Y, -1.0), ValidationError);
}

TEST(Expand, ConstantBidHasOnlyMeanCoefficient) {
  const Fixture2d f = beta_2d();
  // Exact only when projecting with the rule that orthonormalized the basis.
  const Eigen::VectorXd a = expand(poly("c", {{7.5, {}}}), f.basis, f.model, 30);
  EXPECT_NEAR(a(0), 7.5, 1e-12);
  for (Eigen::Index l = 1; l < a.size(); ++l) EXPECT_NEAR(a(l), 0.0, 1e-10) << l;
}

TEST(Expand, BasisPolynomialMapsToUnitVector) {
  const Fixture2d f = beta_2d();
  for (std::size_t l = 0; l < f.basis.size(); ++l) {
    std::vector<PolyTerm> terms;
    for (std::size_t j = 0; j <= l; ++j) {
      PolyTerm t;
      t.coef = f.basis.coeffs(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
      for (Index i = 0; i < 2; ++i) {
        if (f.basis.monomials[j].exponents()[i] > 0) t.powers.push_back({i, f.basis.monomials[j].exponents()[i]});
      }
      terms.push_back(t);
    }
    const BidFunction q = poly("psi", terms);
    const Eigen::VectorXd a = expand(q, f.basis, f.model, 30);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a(i), static_cast<Eigen::Index>(l) == i ? 1.0 : 0.0, 1e-9) << l << "," << i;
    }
    EXPECT_LE(expansion_error(q, a, f.basis, f.model, 2000, 4), 1e-10) << l;
  }
}

TEST(Expand, LinearBidMeanIsLinearInMarginalMeans) {
  const Scenario s = canonical_scenario("normal8");
  const OrthonormalBasis b = build(s, 2);
  const JointModel model = s.model();
  std::vector<PolyTerm> terms{{4.0, {}}};
  double expected = 4.0;
  for (Index i = 0; i < 8; ++i) {
    const double c = 0.25 * (static_cast<double>(i) - 3.5);
    terms.push_back({c, {{i, 1}}});
    expected += c * model.marginal(i).mean();
  }
  const Eigen::VectorXd a = expand(poly("lin", terms), b, model, 2);
  EXPECT_NEAR(a(0), expected, 1e-9);
}

TEST(Expand, IsLinearInTheBid) {
  const Fixture2d f = beta_2d(0.3);
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<std::vector<std::pair<Index, int>>> shapes{{}, {{0, 1}}, {{1, 1}}, {{0, 2}}, {{0, 1}, {1, 1}}, {{1, 2}}};
    std::vector<PolyTerm> t1, t2, sum;
    const double alpha = u(gen), beta = u(gen);
    for (const auto& powers : shapes) {
      const double c1 = u(gen), c2 = u(gen);
      t1.push_back({c1, powers});
      t2.push_back({c2, powers});
      sum.push_back({alpha * c1 + beta * c2, powers});
    }
    const Eigen::VectorXd a1 = expand(poly("a", t1), f.basis, f.model, 20);
    const Eigen::VectorXd a2 = expand(poly("b", t2), f.basis, f.model, 20);
    const Eigen::VectorXd as = expand(poly("s", sum), f.basis, f.model, 20);
    EXPECT_LE((as - (alpha * a1 + beta * a2)).cwiseAbs().maxCoeff(), 1e-10) << trial;
  }
}

TEST(Expand, DirectAndMomentsModesAgree) {
  // The moments route integrates each moment on its own variables while the
  // direct route uses the colored grid of the bid's support; for non-polynomial
  // marginal transforms these rules agree to quadrature accuracy only.
  const Fixture2d f = beta_2d();
  const BidFunction q = poly("q", {{1.0, {}}, {2.0, {{0, 2}}}, {-0.5, {{0, 1}, {1, 1}}}});
  ExpandOptions direct;
  direct.mode = ProjectionMode::direct;
  const Eigen::VectorXd a = expand(q, f.basis, f.model, 30);
  const Eigen::VectorXd b = expand(q, f.basis, f.model, 30, direct);
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Expand, DirectAndMomentsModesAgreeExactlyForNormalMarginals) {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, -0.6, -0.6, 1.0;
  const JointModel model(GaussianCopula(s), {Marginal::normal(1, 2), Marginal::normal(-3, 0.5)});
  auto set = generate_monomials(2, 2);
  const MomentTable t = moment_table(set, model, 6);
  const Eigen::MatrixXd g = gram_matrix(set, t);
  const OrthonormalBasis basis = orthonormalize(g, std::move(set));
  const BidFunction q = poly("q", {{1.0, {}}, {2.0, {{0, 2}}}, {-0.5, {{0, 1}, {1, 1}}}});
  ExpandOptions direct;
  direct.mode = ProjectionMode::direct;
  const Eigen::VectorXd a = expand(q, basis, model, 6);
  const Eigen::VectorXd b = expand(q, basis, model, 6, direct);
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-11 * a.cwiseAbs().maxCoeff());
}

TEST(Expand, UnchangedWhenMarginalsOutsideSupportChange) {
  // nu = 2 restatement of support locality.
  Eigen::MatrixXd s(3, 3);
  s << 1.0, 0.4, 0.3, 0.4, 1.0, 0.2, 0.3, 0.2, 1.0;
  const std::vector<Marginal> m1{Marginal::beta(2, 2), Marginal::normal(0, 1), Marginal::uniform(0, 1)};
  std::vector<Marginal> m2 = m1;
  m2[2] = Marginal::beta(5, 2, -3, 3);
  const JointModel model1(GaussianCopula(s), m1);
  const JointModel model2(GaussianCopula(s), m2);
  MonomialFilter f;
  f.groups = {{0, 1}, {2}};
  auto set = generate_monomials(3, 2, f);
  const auto basis_for = [&](const JointModel& model) {
    auto copy = set;
    const MomentTable t = moment_table(copy, model, 25);
    const Eigen::MatrixXd g = gram_matrix(copy, t);
    return orthonormalize(g, std::move(copy));
  };
  const BidFunction q = poly("q", {{1.0, {{0, 1}}}, {0.5, {{0, 1}, {1, 1}}}, {-2.0, {{1, 2}}}});
  const OrthonormalBasis b1 = basis_for(model1);
  const OrthonormalBasis b2 = basis_for(model2);
  const Eigen::VectorXd a1 = expand(q, b1, model1, 25);
  const Eigen::VectorXd a2 = expand(q, b2, model2, 25);
  // The expansion as a function of the support variables is the same; the
  // value of the third coordinate is irrelevant because q lies in the span.
  for (double x0 : {0.1, 0.5, 0.9}) {
    for (double x1 : {-1.5, 0.0, 2.0}) {
      const std::vector<double> p1{x0, x1, 0.3};
      const std::vector<double> p2{x0, x1, -2.0};
      EXPECT_NEAR(evaluate_expansion(a1, b1, p1), evaluate_expansion(a2, b2, p2), 1e-10);
    }
  }
  EXPECT_NEAR(moments(a1).mean, moments(a2).mean, 1e-10);
  EXPECT_NEAR(moments(a1).sigma, moments(a2).sigma, 1e-10);
}

TEST(Expand, ParsevalMatchesSampledSecondMoment) {
  const Fixture2d f = beta_2d(0.6);
  const BidFunction q = poly("q", {{3.0, {}}, {1.5, {{0, 1}}}, {-0.7, {{1, 2}}}, {0.4, {{0, 1}, {1, 1}}}});
  const Eigen::VectorXd a = expand(q, f.basis, f.model, 30);
  const std::size_t n = 100000;
  const RowMatrix xs = sample(f.model, n, 77);
  Eigen::ArrayXd sq(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double v = q.evaluate(std::span<const double>(xs.row(r).data(), 2));
    sq(r) = v * v;
  }
  const double mean = sq.mean();
  const double se = std::sqrt((sq - mean).square().sum() / (n - 1) / n);
  EXPECT_NEAR(a.squaredNorm(), mean, 5.0 * se);
}

TEST(Moments, ClosedFormExamples) {
  const OutputMoments m1 = moments((Eigen::VectorXd(1) << 5.0).finished());
  EXPECT_EQ(m1.mean, 5.0);
  EXPECT_EQ(m1.sigma, 0.0);
  const OutputMoments m2 = moments((Eigen::VectorXd(3) << 0.0, 3.0, 4.0).finished());
  EXPECT_EQ(m2.mean, 0.0);
  EXPECT_DOUBLE_EQ(m2.sigma, 5.0);
  EXPECT_THROW(moments(Eigen::VectorXd()), ParameterError);
}

TEST(Moments, BetaScenarioSigmaMatchesSampling) {
  const Scenario s = canonical_scenario("beta8");
  const JointModel model = s.model();
  const BidFunction& q = s.bids[0];
  const OrthonormalBasis b = build(s, 15);
  const Eigen::VectorXd a = expand(q, b, model, 15);
  const std::size_t n = 100000;
  const RowMatrix xs = sample(model, n, 5150);
  Eigen::ArrayXd v(n);
  for (std::size_t r = 0; r < n; ++r) v(r) = q.evaluate(std::span<const double>(xs.row(r).data(), 8));
  const double mean = v.mean();
  const Eigen::ArrayXd c = v - mean;
  const double var = c.square().sum() / (n - 1);
  const double sd = std::sqrt(var);
  // Standard error of the sample standard deviation from the fourth moment.
  const double m4 = c.pow(4).mean();
  const double se_sd = std::sqrt((m4 - var * var) / n) / (2.0 * sd);
  EXPECT_NEAR(moments(a).sigma, sd, 3.0 * se_sd);
  EXPECT_NEAR(moments(a).mean, mean, 3.0 * sd / std::sqrt(double(n)));
}

TEST(Combine, UnitAndZeroWeights) {
  Eigen::VectorXd c0(3), c1(3);
  c0 << 1.0, 2.0, 3.0;
  c1 << -4.0, 0.5, 0.25;
  const std::vector<Eigen::VectorXd> cols{c0, c1};
  const PceMatrix p = make_pce_matrix(cols, "ref");
  EXPECT_EQ(p.bids(), 2u);
  EXPECT_EQ(p.basis_size(), 3u);
  EXPECT_EQ(combine(Eigen::Vector2d(1, 0), p), c0);
  EXPECT_EQ(combine(Eigen::Vector2d(0, 1), p), c1);
  EXPECT_EQ(combine(Eigen::Vector2d(0, 0), p), Eigen::VectorXd::Zero(3));
  EXPECT_EQ(p.column(1), c1);
  EXPECT_THROW(combine(Eigen::Vector3d(1, 1, 1), p), ParameterError);
}

TEST(Combine, TwoIdenticalBidsDoubleAndMatchSampling) {
  const Fixture2d f = beta_2d(0.4);
  const BidFunction q = poly("q", {{2.0, {}}, {1.0, {{0, 2}}}, {0.8, {{1, 1}}}});
  const Eigen::VectorXd a = expand(q, f.basis, f.model, 30);
  const std::vector<Eigen::VectorXd> cols{a, a};
  const Eigen::VectorXd doubled = combine(Eigen::Vector2d(1, 1), make_pce_matrix(cols, ""));
  EXPECT_LE((doubled - 2.0 * a).cwiseAbs().maxCoeff(), 1e-14);

  const std::size_t n = 100000;
  const RowMatrix xs = sample(f.model, n, 31);
  Eigen::ArrayXd v(n);
  for (std::size_t r = 0; r < n; ++r) v(r) = 2.0 * q.evaluate(std::span<const double>(xs.row(r).data(), 2));
  const double mean = v.mean();
  const double sd = std::sqrt((v - mean).square().sum() / (n - 1));
  EXPECT_NEAR(moments(doubled).mean, mean, 5.0 * sd / std::sqrt(double(n)));
  EXPECT_NEAR(moments(doubled).sigma, sd, 0.02 * sd);
}

TEST(ExpansionError, NormalScenarioBidsAreInTheSpan) {
  const Scenario s = canonical_scenario("normal8");
  const OrthonormalBasis b = build(s, 8);
  const JointModel model = s.model();
  const RowMatrix xs = sample(model, 20000, 9);
  for (const auto& q : s.bids) {
    const Eigen::VectorXd a = expand(q, b, model, 8);
    EXPECT_LE(expansion_error(q, a, b, xs), 1e-8) << q.id();
  }
}

TEST(ExpansionError, DeterministicInSeed) {
  const Fixture2d f = beta_2d();
  const BidFunction q = poly("q", {{1.0, {{0, 1}, {1, 1}}}, {3.0, {}}});
  const Eigen::VectorXd a = expand(q, f.basis, f.model, 30);
  EXPECT_EQ(expansion_error(q, a, f.basis, f.model, 5000, 1), expansion_error(q, a, f.basis, f.model, 5000, 1));
  EXPECT_THROW(expansion_error(q, a, f.basis, f.model, 0, 1), ParameterError);
}

TEST(DefaultOrder, CoversProductDegree) {
  EXPECT_GE(default_projection_order(1, 1), 2);
  EXPECT_GE(2 * default_projection_order(2, 2) - 1, 4);
  EXPECT_GE(2 * default_projection_order(3, 2) - 1, 5);
}
