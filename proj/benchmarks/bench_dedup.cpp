#include <benchmark/benchmark.h>

#include "lanemark/aggregate.hpp"

#include <random>

using namespace lanemark;

namespace {

std::vector<aggregate::WorldDetection> random_detections(int n) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> pos(0.0, 5000.0);
    std::uniform_real_distribution<double> size(5.0, 30.0);
    std::uniform_real_distribution<double> conf(0.05, 1.0);
    static const LaneLabel kLabels[] = {LaneLabel::left_only, LaneLabel::right_only,
                                        LaneLabel::center};
    std::vector<aggregate::WorldDetection> ds;
    ds.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = pos(rng), y = pos(rng);
        ds.push_back({kLabels[i % 3], {x, y, x + size(rng), y + size(rng)}, conf(rng),
                      {"t", i % 16, i % 16}});
    }
    return ds;
}

} // namespace

static void BM_Dedup(benchmark::State& state) {
    const auto ds = random_detections(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto kept = aggregate::dedup(ds, 0.10);
        benchmark::DoNotOptimize(kept.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dedup)->Range(64, 8192);

static void BM_OverlapRatio(benchmark::State& state) {
    const geo::WorldBox a{0, 0, 13, 22};
    const geo::WorldBox b{6, 4, 19, 26};
    for (auto _ : state) {
        benchmark::DoNotOptimize(geo::overlap_ratio(a, b));
    }
}
BENCHMARK(BM_OverlapRatio);
