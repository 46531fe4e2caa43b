#include "qse/estimation.hpp"
#include "qse/information_bounds.hpp"
#include "qse/simulation.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace qse;

const CountVector kVnms = from_acquisition_order(
    CountVector{{615, 553, 613, 605, 550, 576, 596, 609, 575, 622, 577, 601, 574, 569, 591, 569}});

CholeskyModel bell_truth() { return truth_coordinates(preset_state("bell", 0.05), 4); }

void BM_LogLikelihood(benchmark::State& state) {
  const CholeskyModel m = bell_truth().with_lambda(2400.0);
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(m, kVnms, local_projector_set()));
}
BENCHMARK(BM_LogLikelihood);

void BM_LogLikelihoodGradient(benchmark::State& state) {
  const CholeskyModel m = bell_truth().with_lambda(2400.0);
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood_gradient(m, kVnms, local_projector_set()));
}
BENCHMARK(BM_LogLikelihoodGradient);

void BM_Mle(benchmark::State& state) {
  const int rank = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mle(rank, kVnms, local_projector_set()));
}
BENCHMARK(BM_Mle)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_Maice(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(maice(kVnms, local_projector_set()));
}
BENCHMARK(BM_Maice)->Unit(benchmark::kMillisecond);

void BM_BoundCoefficient(benchmark::State& state) {
  const CholeskyModel m = bell_truth();
  for (auto _ : state) benchmark::DoNotOptimize(bound_coefficient(m, local_projector_set()));
}
BENCHMARK(BM_BoundCoefficient)->Unit(benchmark::kMicrosecond);

void BM_FisherMc(benchmark::State& state) {
  const CholeskyModel m = bell_truth().with_lambda(1000.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(fisher_mc(m, local_projector_set(), n, Sampling::poisson, 7, 1));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FisherMc)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SampleCounts(benchmark::State& state) {
  const DensityMatrix rho = preset_state("bell", 0.05);
  std::mt19937_64 rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_counts(rho, local_projector_set(), 1e4, rng));
}
BENCHMARK(BM_SampleCounts);

}  // namespace

BENCHMARK_MAIN();
