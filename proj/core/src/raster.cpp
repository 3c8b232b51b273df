#include "lanemark/raster.hpp"

#include "lanemark/errors.hpp"

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

namespace lanemark::raster {

geo::WorldBox RasterTile::footprint() const {
    const auto tl = geo::pixel_to_world(0, 0, transform);
    const auto br = geo::pixel_to_world(width, height, transform);
    return {tl.x, br.y, br.x, tl.y};
}

std::uint64_t MaskedTile::retained_count() const {
    return std::accumulate(mask.begin(), mask.end(), std::uint64_t{0});
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png(const std::string& path, int width, int height, int channels,
               const std::uint8_t* pixels) {
    if (width <= 0 || height <= 0) throw input_error("write_png: non-positive dimensions");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw input_error("cannot open '" + path + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw input_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw input_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw input_error("libpng error while writing '" + path + "'");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
    for (int row = 0; row < height; ++row) {
        png_write_row(png, const_cast<png_bytep>(pixels + static_cast<std::size_t>(row) * stride));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void read_png(const std::string& path, int channels, int& width, int& height,
              std::vector<std::uint8_t>& pixels) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw input_error("cannot open '" + path + "'");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw input_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw input_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw input_error("malformed PNG '" + path + "'");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    // Normalize to 8-bit gray or RGB.
    png_set_strip_16(png);
    png_set_packing(png);
    const int color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (channels == 3 && (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA))
        png_set_gray_to_rgb(png);
    if (channels == 1 && (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
                          color_type == PNG_COLOR_TYPE_PALETTE))
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_read_update_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const std::size_t stride = png_get_rowbytes(png, info);
    if (stride != static_cast<std::size_t>(width) * static_cast<std::size_t>(channels)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw input_error("unexpected channel layout in '" + path + "'");
    }
    pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                  static_cast<std::size_t>(channels));
    for (int row = 0; row < height; ++row) {
        png_read_row(png, pixels.data() + static_cast<std::size_t>(row) * stride, nullptr);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
}

} // namespace

void write_png_rgb8(const std::string& path, int width, int height,
                    const std::vector<std::uint8_t>& pixels) {
    if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
        throw input_error("write_png_rgb8: pixel buffer size mismatch");
    write_png(path, width, height, 3, pixels.data());
}

void write_png_gray8(const std::string& path, const GrayImage& img) {
    if (img.pixels.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
        throw input_error("write_png_gray8: pixel buffer size mismatch");
    write_png(path, img.width, img.height, 1, img.pixels.data());
}

RasterTile read_png_rgb8(const std::string& path) {
    RasterTile tile;
    read_png(path, 3, tile.width, tile.height, tile.pixels);
    return tile;
}

GrayImage read_png_gray8(const std::string& path) {
    GrayImage img;
    read_png(path, 1, img.width, img.height, img.pixels);
    return img;
}

std::pair<int, int> read_png_size(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw input_error("cannot open '" + path + "'");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw input_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw input_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw input_error("malformed PNG '" + path + "'");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const auto w = static_cast<int>(png_get_image_width(png, info));
    const auto h = static_cast<int>(png_get_image_height(png, info));
    png_destroy_read_struct(&png, &info, nullptr);
    return {w, h};
}

geo::GeoTransform read_world_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open world file '" + path + "'");
    double v[6];
    for (double& x : v) {
        if (!(in >> x)) throw input_error("world file '" + path + "' must have 6 numeric lines");
    }
    if (!(v[0] > 0.0)) throw input_error("world file '" + path + "': pixel size must be positive");
    if (v[1] != 0.0 || v[2] != 0.0) throw input_error("world file '" + path + "': rotation terms unsupported");
    if (v[3] != -v[0]) throw input_error("world file '" + path + "': pixels must be square, north-up");
    geo::GeoTransform t;
    t.px_size = v[0];
    // World file anchors the top-left pixel center; GeoTransform anchors its corner.
    t.origin_x = v[4] - v[0] * 0.5;
    t.origin_y = v[5] + v[0] * 0.5;
    return t;
}

void write_world_file(const std::string& path, const geo::GeoTransform& t) {
    if (!t.valid()) throw input_error("write_world_file: invalid transform");
    std::ofstream out(path);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.10f\n0.0\n0.0\n-%.10f\n%.10f\n%.10f\n",
                  t.px_size, t.px_size, t.origin_x + t.px_size * 0.5, t.origin_y - t.px_size * 0.5);
    out << buf;
}

std::string sibling_path(const std::string& path, const std::string& ext) {
    std::filesystem::path p(path);
    p.replace_extension(ext);
    return p.string();
}

RasterTile read_tile(const std::string& png_path, const std::string& tile_id) {
    RasterTile tile = read_png_rgb8(png_path);
    tile.transform = read_world_file(sibling_path(png_path, ".wld"));
    tile.tile_id = tile_id.empty() ? std::filesystem::path(png_path).stem().string() : tile_id;
    return tile;
}

void write_tile(const std::string& png_path, const RasterTile& tile,
                const std::vector<std::uint8_t>* mask) {
    write_png_rgb8(png_path, tile.width, tile.height, tile.pixels);
    write_world_file(sibling_path(png_path, ".wld"), tile.transform);
    if (mask) {
        GrayImage m;
        m.width = tile.width;
        m.height = tile.height;
        m.pixels.resize(mask->size());
        for (std::size_t i = 0; i < mask->size(); ++i) m.pixels[i] = (*mask)[i] ? 255 : 0;
        std::filesystem::path p(png_path);
        const std::string mask_path = (p.parent_path() / (p.stem().string() + "_mask.png")).string();
        write_png_gray8(mask_path, m);
    }
}

} // namespace lanemark::raster
