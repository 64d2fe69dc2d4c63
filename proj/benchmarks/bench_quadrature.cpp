#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "cpce/quadrature.hpp"
#include "cpce/scenario.hpp"

namespace {

void BM_GaussHermite(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cpce::gauss_hermite(k));
}
BENCHMARK(BM_GaussHermite)->Arg(8)->Arg(20)->Arg(64);

// Three-dimensional marginal of the beta scenario, the widest slice a
// degree-3 monomial needs.
void BM_IntegrateCopula3(benchmark::State& state) {
  const cpce::Scenario s = cpce::canonical_scenario("beta8");
  const cpce::JointModel model = s.model();
  const std::vector<cpce::Index> dims{0, 3, 5};
  const int k = static_cast<int>(state.range(0));
  cpce::IntegrationOptions opts;
  opts.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpce::integrate_copula(
        [](std::span<const double> x) { return x[0] * x[1] * x[2]; }, dims, model, k, opts));
  }
  state.SetItemsProcessed(state.iterations() * k * k * k);
}
BENCHMARK(BM_IntegrateCopula3)->Arg(8)->Arg(15)->Unit(benchmark::kMicrosecond);

}  // namespace
