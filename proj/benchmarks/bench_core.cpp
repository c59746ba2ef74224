#include <benchmark/benchmark.h>

#include <string>

#include "lambda_infer/bounds.h"
#include "lambda_infer/dataset_io.h"
#include "lambda_infer/likelihood.h"
#include "lambda_infer/mcmc.h"
#include "lambda_infer/measure.h"
#include "lambda_infer/moment_space.h"
#include "lambda_infer/prior.h"
#include "lambda_infer/rates.h"

using namespace lambda_infer;

namespace {

auto fixture(const char* name) -> Time_series_data {
  return read_dataset(std::string{LAMBDA_INFER_DATA_DIR} + "/" + name);
}

}  // namespace

static void BM_RateTableFromMixture(benchmark::State& state) {
  auto spec = Prior_spec{};
  auto m = params_to_measure(spec, sample_prior(spec, 3));
  auto n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Rate_table::from_measure(m, n));
}
BENCHMARK(BM_RateTableFromMixture)->Arg(20)->Arg(100);

static void BM_LikelihoodIs(benchmark::State& state) {
  auto mutation = Mutation_model::binary_loci(0.1, 10);
  auto data = prepare_data(fixture("bs.tsv"), mutation);
  auto rates = Rate_table::from_measure(Lambda_measure::uniform(), data.total_size);
  auto particles = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_likelihood(rates, data, mutation, {particles, ++seed}));
  }
}
BENCHMARK(BM_LikelihoodIs)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_TreePeeling(benchmark::State& state) {
  auto mutation = Mutation_model::binary_loci(0.1, 10);
  auto data = prepare_data(fixture("kingman.tsv"), mutation);
  auto rates = Rate_table::from_measure(Lambda_measure::kingman(), data.total_size);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_likelihood(rates, data, mutation, {20, ++seed, Estimator_kind::tree_peeling}));
  }
}
BENCHMARK(BM_TreePeeling)->Unit(benchmark::kMillisecond);

static void BM_Extremize(benchmark::State& state) {
  auto c = std::vector<Moment_constraint>{{3, 0, 0.5}, {4, 1, -0.3}};
  auto grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(extremize(exp_decay_functional(), c, Extremum_mode::max, grid));
  }
}
BENCHMARK(BM_Extremize)->Arg(100)->Arg(1000);

static void BM_GaussQuadrature(benchmark::State& state) {
  auto seq = Moment_sequence::from_measure(Lambda_measure::uniform(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_quadrature(seq));
}
BENCHMARK(BM_GaussQuadrature)->Arg(7)->Arg(15);

static void BM_CompleteMonotonicity(benchmark::State& state) {
  auto spec = Prior_spec{};
  auto seq = params_to_moments(spec, sample_prior(spec, 5), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_complete_monotonicity(seq));
}
BENCHMARK(BM_CompleteMonotonicity)->Arg(20)->Arg(100);
BENCHMARK_MAIN();
