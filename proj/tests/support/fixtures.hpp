// Synthetic-scene builders shared by unit tests and the acceptance suite.
#pragma once

#include "lanemark/chip.hpp"
#include "lanemark/detect.hpp"
#include "lanemark/geo.hpp"
#include "lanemark/raster.hpp"

#include <string>
#include <vector>

namespace fixtures {

inline constexpr std::uint8_t kPavementGray = 80;
inline constexpr std::uint8_t kInkValue = 235;

/// Uniform-fill tile with an all-retained mask.
inline lanemark::raster::MaskedTile make_tile(const std::string& id, int width, int height,
                                              const lanemark::geo::GeoTransform& transform,
                                              std::uint8_t fill = kPavementGray) {
    lanemark::raster::MaskedTile mt;
    mt.tile.tile_id = id;
    mt.tile.width = width;
    mt.tile.height = height;
    mt.tile.transform = transform;
    mt.tile.pixels.assign(static_cast<std::size_t>(width) * height * 3, fill);
    mt.mask.assign(static_cast<std::size_t>(width) * height, 1);
    return mt;
}

/// Stamps a rotated stencil's ink pixels at (col, row) of the tile.
inline void stamp(lanemark::raster::RasterTile& tile, const lanemark::detect::ArrowTemplate& t,
                  int rotation, int col, int row, std::uint8_t ink = kInkValue) {
    const auto r = lanemark::detect::rotate_template(t, rotation);
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            if (!r.at(x, y)) continue;
            const auto i = tile.pixel_index(col + x, row + y);
            tile.pixels[i] = ink;
            tile.pixels[i + 1] = ink;
            tile.pixels[i + 2] = ink;
        }
    }
}

/// Single chip at window (0, 0) over a freshly built tile with stamps.
struct Stamp {
    int template_index;
    int rotation;
    int col, row;
};

inline lanemark::chip::Chip chip_with_stamps(const std::vector<Stamp>& stamps,
                                             std::uint8_t fill = kPavementGray) {
    auto tile = make_tile("chipfx", 256, 256, {0.0, 128.0, 0.5}, fill);
    const auto templates = lanemark::detect::builtin_templates();
    for (const auto& s : stamps)
        stamp(tile.tile, templates[static_cast<std::size_t>(s.template_index)], s.rotation, s.col,
              s.row);
    const auto plans = lanemark::chip::plan_chips("chipfx", 256, 256);
    return lanemark::chip::extract_chip(tile, plans.front());
}

} // namespace fixtures
