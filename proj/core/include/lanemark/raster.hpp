#pragma once

#include "lanemark/geo.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lanemark::raster {

/// 8-bit RGB tile, row-major, band-interleaved (r,g,b per pixel).
struct RasterTile {
    std::string tile_id;
    int width{0};
    int height{0};
    geo::GeoTransform transform;
    std::vector<std::uint8_t> pixels; // width * height * 3

    std::size_t pixel_index(int col, int row) const {
        return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(col)) * 3;
    }

    /// World rectangle covered by the tile.
    geo::WorldBox footprint() const;
};

/// Tile plus a per-pixel retention mask (1 = retained). Masked-out pixels
/// hold the nodata value (0,0,0) in all bands; the mask tells true black
/// apart from nodata.
struct MaskedTile {
    RasterTile tile;
    std::vector<std::uint8_t> mask; // width * height, 0 or 1

    std::uint64_t retained_count() const;
};

struct GrayImage {
    int width{0};
    int height{0};
    std::vector<std::uint8_t> pixels;
};

// PNG I/O (8-bit). Throws input_error on malformed files.
void write_png_rgb8(const std::string& path, int width, int height,
                    const std::vector<std::uint8_t>& pixels);
void write_png_gray8(const std::string& path, const GrayImage& img);
RasterTile read_png_rgb8(const std::string& path); // transform left invalid
GrayImage read_png_gray8(const std::string& path);

/// Header-only read of (width, height).
std::pair<int, int> read_png_size(const std::string& path);

/// 6-line ESRI world file. Lines: px_size, 0, 0, -px_size, world x of the
/// top-left pixel CENTER, world y of that center. Conversion to/from the
/// corner-anchored GeoTransform happens here.
geo::GeoTransform read_world_file(const std::string& path);
void write_world_file(const std::string& path, const geo::GeoTransform& t);

/// Reads "<stem>.png" + "<stem>.wld" into a georeferenced tile; tile_id
/// defaults to the file stem.
RasterTile read_tile(const std::string& png_path, const std::string& tile_id = "");

/// Writes tile PNG + world file (+ "<stem>_mask.png" when mask != nullptr).
void write_tile(const std::string& png_path, const RasterTile& tile,
                const std::vector<std::uint8_t>* mask = nullptr);

/// Replaces the extension of `path` with `ext` (e.g. ".wld").
std::string sibling_path(const std::string& path, const std::string& ext);

} // namespace lanemark::raster
