#include <benchmark/benchmark.h>

#include <vector>

#include "royalty/curves.hpp"
#include "royalty/ingest.hpp"
#include "royalty/market.hpp"
#include "royalty/model.hpp"
#include "royalty/synth.hpp"

namespace {

royalty::PopulationSpec population(int per_group) {
    royalty::PopulationSpec spec;
    spec.seed = 17;
    for (const double g : {-0.3, -0.1, 0.0, 0.1}) {
        spec.groups.push_back({per_group, g, 0.2, 15, 25000.0});
        spec.groups.push_back({per_group, g, 0.2, 6, 25000.0});
    }
    return spec;
}

royalty::Dataset dataset(int per_group) { return royalty::build_dataset(royalty::gen_population(population(per_group))); }

}  // namespace

static void BM_MultiplierFromShares(benchmark::State& state) {
    const std::vector<double> shares(static_cast<std::size_t>(state.range(0)), 0.93);
    for (auto _ : state) benchmark::DoNotOptimize(royalty::multiplier_from_shares(shares, 0.10));
}
BENCHMARK(BM_MultiplierFromShares)->Arg(10)->Arg(70);

static void BM_Percentile(benchmark::State& state) {
    std::vector<double> values(static_cast<std::size_t>(state.range(0)));
    royalty::NormalStream stream(3);
    for (auto& v : values) v = stream.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(royalty::percentile(values, 90.0));
}
BENCHMARK(BM_Percentile)->Arg(100)->Arg(10000);

static void BM_GenPopulation(benchmark::State& state) {
    const auto spec = population(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(royalty::gen_population(spec));
}
BENCHMARK(BM_GenPopulation)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_BuildDataset(benchmark::State& state) {
    const auto raw = royalty::gen_population(population(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(royalty::build_dataset(raw));
}
BENCHMARK(BM_BuildDataset)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_BuildSurfaceSet(benchmark::State& state) {
    const auto data = dataset(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(royalty::build_surface_set(data.assets));
}
BENCHMARK(BM_BuildSurfaceSet)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_Compare(benchmark::State& state) {
    const auto data = dataset(25);
    const auto surfaces = royalty::build_surface_set(data.assets);
    royalty::QuoteGenOptions options;
    options.noise = 0.05;
    const auto quotes = royalty::gen_quotes(data.assets, surfaces, options);
    for (auto _ : state) benchmark::DoNotOptimize(royalty::compare(quotes, surfaces, 0.10));
}
BENCHMARK(BM_Compare)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
