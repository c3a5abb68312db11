#include <benchmark/benchmark.h>

#include <vector>

#include "hetnet/analytics.hpp"
#include "hetnet/simulator.hpp"
#include "hetnet/special_math.hpp"

namespace hetnet {
namespace {

NetworkConfig fig2() {
  NetworkConfig c;
  c.macro = {1e-4, 4.0, db_to_linear(10.0), 8};
  c.pico = {5e-4, 4.0, 1.0, 4};
  c.user_density = 0.01;
  c.bias = db_to_linear(5.0);
  c.bandwidth = 10e6;
  c.in_dof = 4;
  return c;
}

void BM_UpperIncompleteBeta(benchmark::State& state) {
  double z = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(math::upper_incomplete_beta(0.5, 0.75, z));
    z = z < 0.9 ? z + 1e-3 : 0.3;
  }
}
BENCHMARK(BM_UpperIncompleteBeta);

void BM_LaplaceDerivatives(benchmark::State& state) {
  const TierParams tier{1e-4, 3.7, 1.0, 1};
  std::vector<double> out(static_cast<std::size_t>(state.range(0)) + 1);
  for (auto _ : state) {
    math::laplace_derivatives_scaled(4e6, 25.0, tier, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_LaplaceDerivatives)->Arg(4)->Arg(8)->Arg(18);

void BM_MacroTerms(benchmark::State& state) {
  const CoverageAnalyzer an(fig2());
  double beta = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(an.macro_terms(beta));
    beta = beta < 5.0 ? beta * 1.01 : 0.5;
  }
}
BENCHMARK(BM_MacroTerms);

void BM_OffloadedCoverage(benchmark::State& state) {
  const CoverageAnalyzer an(fig2());
  double beta = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(an.offloaded_coverage(beta));
    beta = beta < 5.0 ? beta * 1.01 : 0.5;
  }
}
BENCHMARK(BM_OffloadedCoverage)->Unit(benchmark::kMillisecond);

void BM_SimulateTrials(benchmark::State& state) {
  SimulationOptions o;
  o.trials = 100;
  o.fidelity = state.range(0) == 0 ? Fidelity::Fast : Fidelity::Full;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_trials(fig2(), o));
    ++o.seed;
  }
  state.SetItemsProcessed(state.iterations() * o.trials);
}
BENCHMARK(BM_SimulateTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace hetnet

BENCHMARK_MAIN();
