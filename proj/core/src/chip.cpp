#include "lanemark/chip.hpp"

#include "lanemark/errors.hpp"

#include <algorithm>

namespace lanemark::chip {

namespace {

std::vector<int> axis_origins(int extent, int chip_size, int stride) {
    std::vector<int> origins;
    for (int o = 0; o + chip_size <= extent; o += stride) origins.push_back(o);
    const int tail = std::max(extent - chip_size, 0);
    if (origins.empty() || origins.back() != tail) origins.push_back(tail);
    return origins;
}

} // namespace

std::vector<ChipPlan> plan_chips(const std::string& tile_id, int width, int height,
                                 int chip_size, int stride, int pad) {
    if (width <= 0 || height <= 0)
        throw input_error("plan_chips: non-positive tile dimensions");
    if (chip_size <= 0 || stride <= 0 || pad < 0)
        throw input_error("plan_chips: chip_size and stride must be positive");

    const auto cols = axis_origins(width, chip_size, stride);
    const auto rows = axis_origins(height, chip_size, stride);
    std::vector<ChipPlan> plans;
    plans.reserve(cols.size() * rows.size());
    for (const int row : rows) {
        for (const int col : cols) {
            plans.push_back({tile_id, col, row, chip_size, stride, pad});
        }
    }
    return plans;
}

Chip extract_chip(const raster::MaskedTile& tile, const ChipPlan& plan) {
    const auto& t = tile.tile;
    if (plan.tile_id != t.tile_id)
        throw input_error("extract_chip: plan targets tile '" + plan.tile_id + "', got '" +
                          t.tile_id + "'");
    const int max_col = std::max(t.width - plan.chip_size, 0);
    const int max_row = std::max(t.height - plan.chip_size, 0);
    if (plan.window_col < 0 || plan.window_row < 0 || plan.window_col > max_col ||
        plan.window_row > max_row)
        throw input_error("extract_chip: window outside tile bounds");

    const int outer = plan.outer_size();
    Chip chip;
    chip.plan = plan;
    chip.pixels.assign(static_cast<std::size_t>(outer) * outer * 3, 0);
    const int base_col = plan.window_col - plan.pad;
    const int base_row = plan.window_row - plan.pad;
    for (int y = 0; y < outer; ++y) {
        const int ty = base_row + y;
        if (ty < 0 || ty >= t.height) continue;
        const int x0 = std::clamp(-base_col, 0, outer);
        const int x1 = std::clamp(t.width - base_col, 0, outer);
        if (x0 >= x1) continue;
        const std::size_t src = t.pixel_index(base_col + x0, ty);
        const std::size_t dst = (static_cast<std::size_t>(y) * outer + x0) * 3;
        std::copy_n(t.pixels.begin() + static_cast<std::ptrdiff_t>(src),
                    static_cast<std::size_t>(x1 - x0) * 3,
                    chip.pixels.begin() + static_cast<std::ptrdiff_t>(dst));
    }
    return chip;
}

} // namespace lanemark::chip
