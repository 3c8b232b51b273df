#include <benchmark/benchmark.h>

#include "lanemark/preprocess.hpp"

using namespace lanemark;

namespace {

raster::RasterTile flat_tile(int size) {
    raster::RasterTile tile;
    tile.tile_id = "bench";
    tile.width = size;
    tile.height = size;
    tile.transform = {0.0, size * 0.25, 0.5};
    tile.pixels.assign(static_cast<std::size_t>(size) * size * 3, 80);
    return tile;
}

std::vector<geo::RoadCenterline> two_roads(int size) {
    const double extent = size * 0.5;
    return {
        {"a", {{-50.0, extent * 0.3}, {extent + 50.0, extent * 0.35}}, geo::RoadSystem::State},
        {"b", {{extent * 0.4, -50.0}, {extent * 0.6, extent + 50.0}}, geo::RoadSystem::Local},
    };
}

} // namespace

static void BM_MaskTile(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const auto tile = flat_tile(size);
    const auto lines = two_roads(size);
    for (auto _ : state) {
        auto masked = preprocess::mask_tile(tile, lines, 100.0);
        benchmark::DoNotOptimize(masked.mask.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size) * size);
}
BENCHMARK(BM_MaskTile)->Arg(256)->Arg(512)->Arg(1024);

static void BM_SegmentGridBuild(benchmark::State& state) {
    const auto tile = flat_tile(1024);
    const auto lines = two_roads(1024);
    const auto domain = tile.footprint();
    for (auto _ : state) {
        preprocess::SegmentGrid grid(lines, 100.0, domain);
        benchmark::DoNotOptimize(&grid);
    }
}
BENCHMARK(BM_SegmentGridBuild);

static void BM_SelectTiles(benchmark::State& state) {
    std::vector<preprocess::TileFootprint> tiles;
    for (int gy = 0; gy < 32; ++gy)
        for (int gx = 0; gx < 32; ++gx)
            tiles.push_back({"t", {gx * 100.0, gy * 100.0, gx * 100.0 + 100.0, gy * 100.0 + 100.0}});
    const std::vector<geo::RoadCenterline> lines = {
        {"d", {{-100.0, -100.0}, {3300.0, 3100.0}}, geo::RoadSystem::State}};
    for (auto _ : state) {
        auto selected = preprocess::select_tiles(tiles, lines, 100.0);
        benchmark::DoNotOptimize(selected.data());
    }
}
BENCHMARK(BM_SelectTiles);
