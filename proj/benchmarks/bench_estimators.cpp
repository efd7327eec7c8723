#include <benchmark/benchmark.h>

#include <vector>

#include "esrisk/distributions.hpp"
#include "esrisk/estimators.hpp"
#include "esrisk/rng.hpp"

using namespace esrisk;

namespace {

std::vector<double> make_sample(const DistributionModel& model, std::size_t n) {
    Xoshiro256pp rng(4242);
    std::vector<double> s(n);
    for (double& x : s) x = model.sample(rng.uniform01());
    return s;
}

}  // namespace

static void BM_InverseTransformKinked(benchmark::State& state) {
    const auto model = DistributionModel::kinked();
    Xoshiro256pp rng(1);
    for (auto _ : state) {
        double acc = 0.0;
        for (int i = 0; i < state.range(0); ++i) acc += model.sample(rng.uniform01());
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InverseTransformKinked)->Arg(1 << 16);

static void BM_InverseTransformCubic(benchmark::State& state) {
    const auto model = DistributionModel::cubic();
    Xoshiro256pp rng(1);
    for (auto _ : state) {
        double acc = 0.0;
        for (int i = 0; i < state.range(0); ++i) acc += model.sample(rng.uniform01());
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InverseTransformCubic)->Arg(1 << 16);

static void BM_EmpiricalQuantile(benchmark::State& state) {
    const auto sample = make_sample(DistributionModel::kinked(), state.range(0));
    std::vector<double> scratch(sample.size());
    for (auto _ : state) {
        scratch = sample;
        benchmark::DoNotOptimize(empirical_quantile_inplace(scratch, 0.2));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EmpiricalQuantile)->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->Complexity();

static void BM_ContrastEs(benchmark::State& state) {
    const auto sample = make_sample(DistributionModel::kinked(), state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(contrast_es(sample, 0.2));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ContrastEs)->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->Complexity();

static void BM_SmoothedQuantile(benchmark::State& state) {
    const auto sample = make_sample(DistributionModel::kinked(), state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(smoothed_quantile(sample, 0.2, 0.0333));
    }
}
BENCHMARK(BM_SmoothedQuantile)->Arg(1 << 14);

static void BM_SpectralEstimate(benchmark::State& state) {
    const auto sample = make_sample(DistributionModel::kinked(), 1 << 16);
    const SpectralMeasure mu({0.1, 0.2, 0.4}, {0.2, 0.3, 0.5});
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_estimate(sample, mu));
    }
}
BENCHMARK(BM_SpectralEstimate);

BENCHMARK_MAIN();
