#pragma once

#include "lanemark/raster.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lanemark::chip {

inline constexpr int kChipSize = 256;
inline constexpr int kStride = 128;
inline constexpr int kPad = 56;

/// One detection window on a tile. The chip delivered to the detector is
/// (chip_size + 2*pad) square; detections are reported in the chip_size²
/// interior's coordinates.
struct ChipPlan {
    std::string tile_id;
    int window_col{0};
    int window_row{0};
    int chip_size{kChipSize};
    int stride{kStride};
    int pad{kPad};

    int outer_size() const { return chip_size + 2 * pad; }
    bool operator==(const ChipPlan&) const = default;
};

struct Chip {
    ChipPlan plan;
    std::vector<std::uint8_t> pixels; // outer_size² RGB
};

/// Window origins at every stride multiple while the window fits, plus one
/// clamped tail window per axis when the extent is not covered. Tiles
/// smaller than chip_size get a single window at 0. Row-major order.
std::vector<ChipPlan> plan_chips(const std::string& tile_id, int width, int height,
                                 int chip_size = kChipSize, int stride = kStride,
                                 int pad = kPad);

/// Cuts the plan's window plus its pad ring out of the tile. Pixels beyond
/// the tile bounds are nodata fill (0,0,0).
Chip extract_chip(const raster::MaskedTile& tile, const ChipPlan& plan);

} // namespace lanemark::chip
