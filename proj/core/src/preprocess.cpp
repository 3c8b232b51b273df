#include "lanemark/preprocess.hpp"

#include "lanemark/csv.hpp"
#include "lanemark/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace lanemark::preprocess {

SegmentGrid::SegmentGrid(const std::vector<geo::RoadCenterline>& lines, double radius,
                         const geo::WorldBox& domain)
    : radius_(radius), cell_(radius > 0.0 ? radius : 1.0) {
    if (radius <= 0.0) throw input_error("buffer radius must be positive");
    grid_min_x_ = domain.min_x - radius;
    grid_min_y_ = domain.min_y - radius;
    cols_ = std::max(1, static_cast<int>(std::ceil((domain.width() + 2.0 * radius) / cell_)));
    rows_ = std::max(1, static_cast<int>(std::ceil((domain.height() + 2.0 * radius) / cell_)));
    cells_.resize(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_));

    const geo::WorldBox reach{domain.min_x - radius, domain.min_y - radius,
                              domain.max_x + radius, domain.max_y + radius};
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& verts = lines[li].vertices;
        for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
            const auto& a = verts[i];
            const auto& b = verts[i + 1];
            // Skip segments that cannot reach the domain at all.
            const geo::WorldBox seg_box{std::min(a.x, b.x), std::min(a.y, b.y),
                                        std::max(a.x, b.x), std::max(a.y, b.y)};
            if (seg_box.max_x < reach.min_x || seg_box.min_x > reach.max_x ||
                seg_box.max_y < reach.min_y || seg_box.min_y > reach.max_y)
                continue;
            const auto seg_index = static_cast<std::uint32_t>(segments_.size());
            segments_.push_back({a, b, static_cast<int>(li)});

            const int cx0 = std::clamp(static_cast<int>(std::floor((seg_box.min_x - radius - grid_min_x_) / cell_)), 0, cols_ - 1);
            const int cx1 = std::clamp(static_cast<int>(std::floor((seg_box.max_x + radius - grid_min_x_) / cell_)), 0, cols_ - 1);
            const int cy0 = std::clamp(static_cast<int>(std::floor((seg_box.min_y - radius - grid_min_y_) / cell_)), 0, rows_ - 1);
            const int cy1 = std::clamp(static_cast<int>(std::floor((seg_box.max_y + radius - grid_min_y_) / cell_)), 0, rows_ - 1);
            for (int cy = cy0; cy <= cy1; ++cy) {
                for (int cx = cx0; cx <= cx1; ++cx) {
                    const geo::WorldBox cell_rect{grid_min_x_ + cx * cell_, grid_min_y_ + cy * cell_,
                                                  grid_min_x_ + (cx + 1) * cell_, grid_min_y_ + (cy + 1) * cell_};
                    if (geo::distance_segment_to_box(a, b, cell_rect) <= radius) {
                        cells_[static_cast<std::size_t>(cy) * cols_ + cx].push_back(seg_index);
                    }
                }
            }
        }
    }
}

std::size_t SegmentGrid::cell_of(const geo::WorldPoint& p) const {
    const int cx = std::clamp(static_cast<int>(std::floor((p.x - grid_min_x_) / cell_)), 0, cols_ - 1);
    const int cy = std::clamp(static_cast<int>(std::floor((p.y - grid_min_y_) / cell_)), 0, rows_ - 1);
    return static_cast<std::size_t>(cy) * cols_ + cx;
}

bool SegmentGrid::within_radius(const geo::WorldPoint& p) const {
    for (const auto si : cells_[cell_of(p)]) {
        const auto& s = segments_[si];
        if (geo::distance_point_to_segment(p, s.a, s.b) <= radius_) return true;
    }
    return false;
}

int SegmentGrid::nearest_line(const geo::WorldPoint& p, double* distance_out) const {
    double best = std::numeric_limits<double>::infinity();
    int best_line = -1;
    for (const auto si : cells_[cell_of(p)]) {
        const auto& s = segments_[si];
        const double d = geo::distance_point_to_segment(p, s.a, s.b);
        if (d < best || (d == best && s.line_index < best_line)) {
            best = d;
            best_line = s.line_index;
        }
    }
    if (best > radius_) return -1;
    if (distance_out) *distance_out = best;
    return best_line;
}

std::vector<std::string> select_tiles(const std::vector<TileFootprint>& tiles,
                                      const std::vector<geo::RoadCenterline>& lines,
                                      double buffer_radius) {
    if (buffer_radius <= 0.0) throw input_error("buffer radius must be positive");
    std::vector<std::string> selected;
    for (const auto& tile : tiles) {
        bool hit = false;
        for (const auto& line : lines) {
            for (std::size_t i = 0; !hit && i + 1 < line.vertices.size(); ++i) {
                hit = geo::distance_segment_to_box(line.vertices[i], line.vertices[i + 1],
                                                   tile.bounds) <= buffer_radius;
            }
            if (hit) break;
        }
        if (hit) selected.push_back(tile.tile_id);
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

raster::MaskedTile mask_tile(const raster::RasterTile& tile,
                             const std::vector<geo::RoadCenterline>& lines,
                             double buffer_radius) {
    if (!tile.transform.valid())
        throw input_error("mask_tile: tile '" + tile.tile_id + "' has no valid transform");
    if (buffer_radius <= 0.0) throw input_error("buffer radius must be positive");
    if (tile.pixels.size() != static_cast<std::size_t>(tile.width) * tile.height * 3)
        throw input_error("mask_tile: pixel buffer size mismatch");

    raster::MaskedTile out;
    out.tile = tile;
    out.mask.assign(static_cast<std::size_t>(tile.width) * tile.height, 0);

    const SegmentGrid grid(lines, buffer_radius, tile.footprint());
    for (int row = 0; row < tile.height; ++row) {
        for (int col = 0; col < tile.width; ++col) {
            const auto center = geo::pixel_to_world(col + 0.5, row + 0.5, tile.transform);
            const std::size_t mi = static_cast<std::size_t>(row) * tile.width + col;
            if (grid.within_radius(center)) {
                out.mask[mi] = 1;
            } else {
                const std::size_t pi = mi * 3;
                out.tile.pixels[pi] = 0;
                out.tile.pixels[pi + 1] = 0;
                out.tile.pixels[pi + 2] = 0;
            }
        }
    }
    return out;
}

void write_mask_manifest(std::ostream& out, const std::vector<MaskManifestRow>& rows) {
    out << "tile_id,path,width,height,retained_pixel_count\n";
    for (const auto& r : rows) {
        out << csv::escape(r.tile_id) << ',' << csv::escape(r.path) << ',' << r.width << ','
            << r.height << ',' << r.retained_pixel_count << '\n';
    }
}

std::vector<MaskManifestRow> read_mask_manifest(std::istream& in) {
    auto records = csv::read(in);
    if (records.empty()) throw input_error("mask manifest is empty");
    std::vector<MaskManifestRow> rows;
    for (std::size_t i = 1; i < records.size(); ++i) { // skip header
        const auto& f = records[i];
        if (f.size() != 5) throw input_error("mask manifest: expected 5 fields per row");
        rows.push_back({f[0], f[1], std::stoi(f[2]), std::stoi(f[3]),
                        static_cast<std::uint64_t>(std::stoull(f[4]))});
    }
    return rows;
}

} // namespace lanemark::preprocess
