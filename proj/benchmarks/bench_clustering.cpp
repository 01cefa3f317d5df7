#include <benchmark/benchmark.h>

#include <random>

#include "datamech/data_mechanics.hpp"
#include "datamech/hier_clustering.hpp"

namespace {

using namespace datamech;

DistanceMatrix random_distance(std::size_t n, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = u(rng);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("i" + std::to_string(i));
    return DistanceMatrix(std::move(d), std::move(labels));
}

void BM_Agglomerate(benchmark::State& state) {
    auto d = random_distance(static_cast<std::size_t>(state.range(0)), 5);
    for (auto _ : state) {
        auto dend = agglomerate(d, Linkage::average);
        benchmark::DoNotOptimize(dend.merges().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Agglomerate)->Arg(50)->Arg(100)->Arg(200)->Arg(400)->Complexity()
    ->Unit(benchmark::kMillisecond);

void BM_DmIterate(benchmark::State& state) {
    std::mt19937 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    std::size_t rows = static_cast<std::size_t>(state.range(0));
    std::size_t cols = 55;
    std::vector<double> values;
    values.reserve(rows * cols);
    for (std::size_t i = 0; i < rows * cols; ++i) values.push_back(g(rng));
    std::vector<std::string> row_labels, col_labels;
    for (std::size_t i = 0; i < rows; ++i) row_labels.push_back("r" + std::to_string(i));
    for (std::size_t i = 0; i < cols; ++i) col_labels.push_back("c" + std::to_string(i));
    RectMatrix m(std::move(values), std::move(row_labels), std::move(col_labels));
    for (auto _ : state) {
        auto trees = dm_iterate(m, DmConfig{});
        benchmark::DoNotOptimize(trees.block_means.data());
    }
}
BENCHMARK(BM_DmIterate)->Arg(54)->Arg(108)->Unit(benchmark::kMillisecond);

} // namespace
