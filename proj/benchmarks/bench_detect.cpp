#include <benchmark/benchmark.h>

#include "lanemark/chip.hpp"
#include "lanemark/detect.hpp"
#include "lanemark/raster.hpp"

using namespace lanemark;

namespace {

chip::Chip chip_with_plants(int n_plants) {
    raster::MaskedTile mt;
    mt.tile.tile_id = "bench";
    mt.tile.width = 256;
    mt.tile.height = 256;
    mt.tile.transform = {0.0, 128.0, 0.5};
    mt.tile.pixels.assign(256 * 256 * 3, 80);
    mt.mask.assign(256 * 256, 1);
    const auto templates = detect::builtin_templates();
    for (int i = 0; i < n_plants; ++i) {
        const auto t = detect::rotate_template(templates[i % 3], i % 4);
        const int col = 20 + (i % 3) * 70;
        const int row = 20 + (i / 3) * 70;
        for (int y = 0; y < t.height; ++y)
            for (int x = 0; x < t.width; ++x)
                if (t.at(x, y)) {
                    const auto p = mt.tile.pixel_index(col + x, row + y);
                    mt.tile.pixels[p] = 235;
                    mt.tile.pixels[p + 1] = 235;
                    mt.tile.pixels[p + 2] = 235;
                }
    }
    return chip::extract_chip(mt, chip::plan_chips("bench", 256, 256).front());
}

} // namespace

static void BM_ReferenceDetect(benchmark::State& state) {
    const detect::ReferenceDetector det(detect::builtin_templates(), 0.8);
    const auto c = chip_with_plants(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto ds = det.detect(c);
        benchmark::DoNotOptimize(ds.data());
    }
}
BENCHMARK(BM_ReferenceDetect)->Arg(0)->Arg(3)->Arg(9);

static void BM_NccScore(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = static_cast<double>(i % 251);
        b[i] = static_cast<double>((i * 7) % 241);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect::ncc_score(a, b));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NccScore)->Range(256, 16384);
