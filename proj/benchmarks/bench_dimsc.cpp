#include <benchmark/benchmark.h>

#include "dimsc/corners.hpp"
#include "dimsc/estimator.hpp"
#include "dimsc/experiments.hpp"
#include "dimsc/linalg.hpp"
#include "dimsc/metrics.hpp"
#include "dimsc/model.hpp"

using namespace dimsc;

namespace {

ModelParams default_params() {
  return make_paper_params(ExperimentId::sparsity, 1.0, 11);
}

void BM_TruncatedSvd(benchmark::State& state) {
  ModelParams params = default_params();
  Matrix dense =
      sample_adjacency(population_matrix(params), 1).to_dense();
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncated_svd(dense, 3));
  }
}
BENCHMARK(BM_TruncatedSvd)->Unit(benchmark::kMillisecond);

void BM_FitDimsc(benchmark::State& state) {
  ModelParams params = default_params();
  auto a = sample_adjacency(population_matrix(params), 1);
  auto pruned = prune_isolated(a, params.pi_r, params.pi_c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_dimsc(pruned.a, 3, 7));
  }
}
BENCHMARK(BM_FitDimsc)->Unit(benchmark::kMillisecond);

void BM_FitDimscEquivalence(benchmark::State& state) {
  ModelParams params = default_params();
  auto a = sample_adjacency(population_matrix(params), 1);
  auto pruned = prune_isolated(a, params.pi_r, params.pi_c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_dimsc_equivalence(pruned.a, 3, 7));
  }
}
BENCHMARK(BM_FitDimscEquivalence)->Unit(benchmark::kMillisecond);

void BM_OneClassSvm(benchmark::State& state) {
  ModelParams params = default_params();
  auto dec = truncated_svd(population_matrix(params), 3);
  Matrix u_star = row_normalize(dec.u).rows;
  for (auto _ : state) {
    benchmark::DoNotOptimize(one_class_svm(u_star));
  }
}
BENCHMARK(BM_OneClassSvm)->Unit(benchmark::kMillisecond);

void BM_SuccessiveProjection(benchmark::State& state) {
  ModelParams params = default_params();
  auto dec = truncated_svd(population_matrix(params), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(successive_projection(dec.v, 3));
  }
}
BENCHMARK(BM_SuccessiveProjection)->Unit(benchmark::kMillisecond);

void BM_MixedHamming(benchmark::State& state) {
  ModelParams params = default_params();
  auto est = fit_ideal(population_matrix(params), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixed_hamming(est.pi_r, params.pi_r));
  }
}
BENCHMARK(BM_MixedHamming)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
