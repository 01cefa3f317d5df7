#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "datamech/gapped_histogram.hpp"

namespace {

std::vector<double> gaussian_mixture(std::size_t n, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(g(rng) + (i % 3 == 0 ? 6.0 : 0.0));
    return out;
}

void BM_BuildHistogram(benchmark::State& state) {
    auto values = gaussian_mixture(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) {
        auto hist = datamech::build_histogram(values);
        benchmark::DoNotOptimize(hist.fit_error());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildHistogram)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void BM_Categorize(benchmark::State& state) {
    auto values = gaussian_mixture(static_cast<std::size_t>(state.range(0)), 9);
    auto hist = datamech::build_histogram(values);
    for (auto _ : state) {
        auto cats = datamech::categorize(hist, values);
        benchmark::DoNotOptimize(cats.data());
    }
}
BENCHMARK(BM_Categorize)->Arg(1000)->Arg(10000);

} // namespace
