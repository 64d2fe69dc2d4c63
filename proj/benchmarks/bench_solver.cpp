#include <benchmark/benchmark.h>

#include "cpce/basis.hpp"
#include "cpce/pce.hpp"
#include "cpce/procurement.hpp"
#include "cpce/scenario.hpp"

namespace {

void BM_SolveNormal8(benchmark::State& state) {
  const cpce::Scenario s = cpce::canonical_scenario("normal8");
  const cpce::JointModel model = s.model();
  const int k = s.quadrature_order();
  auto set = cpce::generate_monomials(s.dimension, s.monomials.max_degree, s.filter());
  cpce::MomentTable table = cpce::moment_table(set, model, k);
  const Eigen::MatrixXd gram = cpce::gram_matrix(set, table);
  const cpce::OrthonormalBasis basis = cpce::orthonormalize(gram, std::move(set));
  std::vector<Eigen::VectorXd> cols;
  for (const auto& q : s.bids) cols.push_back(cpce::expand(q, basis, model, k, {}, &table));
  const cpce::PceMatrix pce = cpce::make_pce_matrix(cols, "bench");
  const auto lambda = cpce::QuantilePair::from_epsilon(s.procurement.epsilon);
  for (auto _ : state) benchmark::DoNotOptimize(cpce::solve_procurement(s.procurement, pce, lambda));
}
BENCHMARK(BM_SolveNormal8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
