#pragma once

#include "lanemark/geo.hpp"
#include "lanemark/raster.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lanemark::preprocess {

inline constexpr double kDefaultBufferRadiusFt = 100.0;

struct TileFootprint {
    std::string tile_id;
    geo::WorldBox bounds;
};

/// Spatial hash over centerline segments, cell size = buffer radius.
/// query(cell of p) returns every segment within `radius` of any point in
/// that cell, so a per-pixel distance test only visits nearby segments.
class SegmentGrid {
public:
    SegmentGrid(const std::vector<geo::RoadCenterline>& lines, double radius,
                const geo::WorldBox& domain);

    /// True iff p lies within `radius` of some indexed segment.
    bool within_radius(const geo::WorldPoint& p) const;

    /// Index of the nearest centerline (into the constructor's list), or -1
    /// if none is within `radius`. Ties resolve to the lowest index.
    int nearest_line(const geo::WorldPoint& p, double* distance_out = nullptr) const;

private:
    struct Segment {
        geo::WorldPoint a, b;
        int line_index;
    };

    std::size_t cell_of(const geo::WorldPoint& p) const;

    double radius_;
    double cell_;
    double grid_min_x_, grid_min_y_;
    int cols_{0}, rows_{0};
    std::vector<Segment> segments_;
    std::vector<std::vector<std::uint32_t>> cells_;
};

/// Tiles whose footprint comes within `buffer_radius` of (or is crossed by)
/// at least one centerline segment, sorted by tile_id.
std::vector<std::string> select_tiles(const std::vector<TileFootprint>& tiles,
                                      const std::vector<geo::RoadCenterline>& lines,
                                      double buffer_radius = kDefaultBufferRadiusFt);

/// Retains exactly the pixels whose CENTER lies within `buffer_radius` of
/// some centerline; everything else becomes nodata (0,0,0).
raster::MaskedTile mask_tile(const raster::RasterTile& tile,
                             const std::vector<geo::RoadCenterline>& lines,
                             double buffer_radius = kDefaultBufferRadiusFt);

struct MaskManifestRow {
    std::string tile_id;
    std::string path;
    int width{0};
    int height{0};
    std::uint64_t retained_pixel_count{0};
};

void write_mask_manifest(std::ostream& out, const std::vector<MaskManifestRow>& rows);
std::vector<MaskManifestRow> read_mask_manifest(std::istream& in);

} // namespace lanemark::preprocess
