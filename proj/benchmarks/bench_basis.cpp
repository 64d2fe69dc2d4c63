#include <benchmark/benchmark.h>

#include "cpce/basis.hpp"
#include "cpce/scenario.hpp"

namespace {

void BM_MomentTable(benchmark::State& state, const char* name) {
  const cpce::Scenario s = cpce::canonical_scenario(name);
  const auto set = cpce::generate_monomials(s.dimension, s.monomials.max_degree, s.filter());
  const cpce::JointModel model = s.model();
  cpce::IntegrationOptions opts = s.integration();
  opts.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpce::moment_table(set, model, s.quadrature_order(), opts));
  }
}
BENCHMARK_CAPTURE(BM_MomentTable, normal8, "normal8")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MomentTable, beta8, "beta8")->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_Orthonormalize(benchmark::State& state) {
  const cpce::Scenario s = cpce::canonical_scenario("normal8");
  const auto set = cpce::generate_monomials(s.dimension, s.monomials.max_degree, s.filter());
  const cpce::MomentTable table = cpce::moment_table(set, s.model(), s.quadrature_order());
  const Eigen::MatrixXd gram = cpce::gram_matrix(set, table);
  for (auto _ : state) benchmark::DoNotOptimize(cpce::orthonormalize(gram, set));
}
BENCHMARK(BM_Orthonormalize)->Unit(benchmark::kMicrosecond);

}  // namespace
