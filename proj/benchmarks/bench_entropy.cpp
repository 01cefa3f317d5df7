#include <benchmark/benchmark.h>

#include <random>

#include "datamech/conditional_entropy.hpp"
#include "datamech/dataset.hpp"

namespace {

using namespace datamech;

PitchDataset correlated_dataset(std::size_t n, std::size_t features, std::uint32_t seed) {
    std::vector<Feature> fs;
    for (std::size_t i = 0; i < features; ++i)
        fs.push_back({"f" + std::to_string(i), "u", true});
    FeatureSchema schema("1", fs);
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<PitchRecord> records;
    for (std::size_t i = 0; i < n; ++i) {
        PitchRecord r;
        r.pitcher_id = "bench";
        r.season = 2015;
        r.game_date = "2015-06-01";
        r.temporal_index = i;
        r.pitch_type = "FF";
        double latent = g(rng);
        for (std::size_t f = 0; f < features; ++f)
            r.values.push_back(0.8 * latent + 0.6 * g(rng) + (i % 2 ? 3.0 : 0.0));
        records.push_back(std::move(r));
    }
    return PitchDataset(schema, std::move(records));
}

void BM_MutualCe(benchmark::State& state) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> cell(0, 30);
    std::vector<std::uint64_t> counts(36);
    for (auto& c : counts) c = static_cast<std::uint64_t>(cell(rng)) + 1;
    ContingencyTable table(6, 6, counts);
    for (auto _ : state) {
        double v = mutual_ce(table);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_MutualCe);

void BM_MceMatrix(benchmark::State& state) {
    auto ds = correlated_dataset(static_cast<std::size_t>(state.range(0)), 8, 11);
    auto names = ds.schema().names();
    for (auto _ : state) {
        auto m = mce_matrix(ds, names);
        benchmark::DoNotOptimize(m.at(0, 1));
    }
}
BENCHMARK(BM_MceMatrix)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

} // namespace
