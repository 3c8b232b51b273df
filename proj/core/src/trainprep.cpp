#include "lanemark/trainprep.hpp"

#include "lanemark/chip.hpp"
#include "lanemark/csv.hpp"
#include "lanemark/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace lanemark::trainprep {

const char* split_name(SplitSet s) {
    switch (s) {
    case SplitSet::train: return "train";
    case SplitSet::validation: return "validation";
    default: return "test";
    }
}

std::map<LaneLabel, long> TrainingManifest::class_counts() const {
    std::map<LaneLabel, long> counts;
    for (const auto& c : chips)
        for (const auto& o : c.objects) ++counts[o.label];
    return counts;
}

namespace {

detect::PixelBox feature_pixel_box(const LabeledFeature& f, const raster::RasterTile& tile) {
    const auto tl = geo::world_to_pixel({f.bbox.min_x, f.bbox.max_y}, tile.transform);
    const auto br = geo::world_to_pixel({f.bbox.max_x, f.bbox.min_y}, tile.transform);
    detect::PixelBox px;
    px.min_x = static_cast<int>(std::floor(tl.col));
    px.min_y = static_cast<int>(std::floor(tl.row));
    px.max_x = static_cast<int>(std::ceil(br.col));
    px.max_y = static_cast<int>(std::ceil(br.row));
    px.min_x = std::clamp(px.min_x, 0, tile.width);
    px.min_y = std::clamp(px.min_y, 0, tile.height);
    px.max_x = std::clamp(px.max_x, 0, tile.width);
    px.max_y = std::clamp(px.max_y, 0, tile.height);
    return px;
}

bool window_contains(const chip::ChipPlan& w, const detect::PixelBox& b) {
    return b.min_x >= w.window_col && b.min_y >= w.window_row &&
           b.max_x <= w.window_col + w.chip_size && b.max_y <= w.window_row + w.chip_size;
}

long window_overlap(const chip::ChipPlan& w, const detect::PixelBox& b) {
    const long ox = std::min<long>(b.max_x, w.window_col + w.chip_size) -
                    std::max<long>(b.min_x, w.window_col);
    const long oy = std::min<long>(b.max_y, w.window_row + w.chip_size) -
                    std::max<long>(b.min_y, w.window_row);
    return std::max(ox, 0L) * std::max(oy, 0L);
}

} // namespace

TrainingManifest export_chips(const std::vector<raster::RasterTile>& tiles,
                              const std::vector<LabeledFeature>& features, int chip_size,
                              Schema schema) {
    if (chip_size <= 0) throw input_error("export_chips: chip_size must be positive");
    TrainingManifest manifest;
    manifest.schema = schema;

    std::map<std::string, const raster::RasterTile*> by_id;
    for (const auto& t : tiles) by_id[t.tile_id] = &t;

    // Chosen window per feature, then features grouped by window.
    struct Window {
        const raster::RasterTile* tile;
        chip::ChipPlan plan;
        std::vector<std::size_t> assigned; // feature indices routed here
    };
    std::map<std::tuple<std::string, int, int>, Window> windows;

    for (std::size_t fi = 0; fi < features.size(); ++fi) {
        const auto& f = features[fi];
        if (!in_schema(f.label, schema))
            throw input_error(std::string("feature label '") + label_name(f.label) +
                              "' is outside the active schema");
        const auto it = by_id.find(f.tile_id);
        if (it == by_id.end())
            throw input_error("feature references unknown tile '" + f.tile_id + "'");
        const auto& tile = *it->second;
        const auto px = feature_pixel_box(f, tile);
        if (px.width() <= 0 || px.height() <= 0)
            throw input_error("feature bbox does not intersect tile '" + f.tile_id + "'");

        const auto plans = chip::plan_chips(tile.tile_id, tile.width, tile.height, chip_size,
                                            chip_size / 2, 0);
        const chip::ChipPlan* chosen = nullptr;
        for (const auto& p : plans) {
            if (window_contains(p, px)) {
                chosen = &p;
                break;
            }
        }
        if (!chosen) {
            long best = -1;
            for (const auto& p : plans) {
                const long ov = window_overlap(p, px);
                if (ov > best) {
                    best = ov;
                    chosen = &p;
                }
            }
            manifest.warnings.push_back("feature " + std::to_string(fi) + " (" +
                                        label_name(f.label) + ") exceeds chip bounds on tile '" +
                                        f.tile_id + "'; clipped");
        }
        auto& w = windows[{tile.tile_id, chosen->window_col, chosen->window_row}];
        w.tile = &tile;
        w.plan = *chosen;
        w.assigned.push_back(fi);
    }

    for (const auto& [key, w] : windows) {
        TrainingChip tc;
        tc.tile_id = w.tile->tile_id;
        tc.window_col = w.plan.window_col;
        tc.window_row = w.plan.window_row;
        tc.chip_size = chip_size;
        tc.chip_id = tc.tile_id + "_" + std::to_string(tc.window_col) + "_" +
                     std::to_string(tc.window_row);

        // Every feature fully inside this window becomes an object; assigned
        // oversize features are clipped in.
        for (std::size_t fi = 0; fi < features.size(); ++fi) {
            const auto& f = features[fi];
            if (f.tile_id != tc.tile_id) continue;
            auto px = feature_pixel_box(f, *w.tile);
            const bool contained = window_contains(w.plan, px);
            const bool assigned =
                std::find(w.assigned.begin(), w.assigned.end(), fi) != w.assigned.end();
            if (!contained && !assigned) continue;
            px.min_x = std::clamp(px.min_x - tc.window_col, 0, chip_size);
            px.max_x = std::clamp(px.max_x - tc.window_col, 0, chip_size);
            px.min_y = std::clamp(px.min_y - tc.window_row, 0, chip_size);
            px.max_y = std::clamp(px.max_y - tc.window_row, 0, chip_size);
            if (px.width() <= 0 || px.height() <= 0) continue;
            tc.objects.push_back({f.label, px});
        }

        tc.pixels.assign(static_cast<std::size_t>(chip_size) * chip_size * 3, 0);
        for (int y = 0; y < chip_size; ++y) {
            const int ty = tc.window_row + y;
            if (ty >= w.tile->height) break;
            const int copy_w = std::min(chip_size, w.tile->width - tc.window_col);
            if (copy_w <= 0) continue;
            std::copy_n(w.tile->pixels.begin() +
                            static_cast<std::ptrdiff_t>(w.tile->pixel_index(tc.window_col, ty)),
                        static_cast<std::size_t>(copy_w) * 3,
                        tc.pixels.begin() + static_cast<std::ptrdiff_t>(y) * chip_size * 3);
        }
        manifest.chips.push_back(std::move(tc));
    }
    return manifest;
}

std::string voc_xml(const TrainingChip& chip, const std::string& filename) {
    std::ostringstream out;
    out << "<annotation>\n";
    out << "  <filename>" << filename << "</filename>\n";
    out << "  <size>\n";
    out << "    <width>" << chip.chip_size << "</width>\n";
    out << "    <height>" << chip.chip_size << "</height>\n";
    out << "    <depth>3</depth>\n";
    out << "  </size>\n";
    for (const auto& o : chip.objects) {
        out << "  <object>\n";
        out << "    <name>" << label_name(o.label) << "</name>\n";
        out << "    <bndbox>\n";
        out << "      <xmin>" << o.bbox.min_x << "</xmin>\n";
        out << "      <ymin>" << o.bbox.min_y << "</ymin>\n";
        out << "      <xmax>" << o.bbox.max_x << "</xmax>\n";
        out << "      <ymax>" << o.bbox.max_y << "</ymax>\n";
        out << "    </bndbox>\n";
        out << "  </object>\n";
    }
    out << "</annotation>\n";
    return out.str();
}

namespace {

// Minimal element parser for the VOC subset emitted above.
struct XmlCursor {
    const std::string& text;
    std::size_t pos{0};

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool at_open(const std::string& tag) {
        skip_ws();
        const std::string open = "<" + tag + ">";
        return text.compare(pos, open.size(), open) == 0;
    }

    void expect_open(const std::string& tag) {
        if (!at_open(tag)) throw input_error("VOC parse: expected <" + tag + ">");
        pos += tag.size() + 2;
    }

    void expect_close(const std::string& tag) {
        skip_ws();
        const std::string close = "</" + tag + ">";
        if (text.compare(pos, close.size(), close) != 0)
            throw input_error("VOC parse: expected </" + tag + ">");
        pos += close.size();
    }

    std::string text_element(const std::string& tag) {
        expect_open(tag);
        const std::size_t end = text.find("</" + tag + ">", pos);
        if (end == std::string::npos) throw input_error("VOC parse: unterminated <" + tag + ">");
        std::string value = text.substr(pos, end - pos);
        pos = end;
        expect_close(tag);
        // Trim surrounding whitespace.
        const auto b = value.find_first_not_of(" \t\r\n");
        const auto e = value.find_last_not_of(" \t\r\n");
        return b == std::string::npos ? std::string() : value.substr(b, e - b + 1);
    }

    int int_element(const std::string& tag) { return std::stoi(text_element(tag)); }
};

} // namespace

VocAnnotation parse_voc(const std::string& xml) {
    XmlCursor cur{xml};
    VocAnnotation ann;
    cur.expect_open("annotation");
    ann.filename = cur.text_element("filename");
    cur.expect_open("size");
    ann.width = cur.int_element("width");
    ann.height = cur.int_element("height");
    const int depth = cur.int_element("depth");
    if (depth != 3) throw input_error("VOC parse: expected depth 3");
    cur.expect_close("size");
    while (cur.at_open("object")) {
        cur.expect_open("object");
        VocObject o;
        o.label = label_from_string(cur.text_element("name"));
        cur.expect_open("bndbox");
        o.bbox.min_x = cur.int_element("xmin");
        o.bbox.min_y = cur.int_element("ymin");
        o.bbox.max_x = cur.int_element("xmax");
        o.bbox.max_y = cur.int_element("ymax");
        cur.expect_close("bndbox");
        cur.expect_close("object");
        ann.objects.push_back(o);
    }
    cur.expect_close("annotation");
    return ann;
}

RotatedChip rotate90(const std::vector<std::uint8_t>& pixels, int width, int height,
                     const std::vector<VocObject>& objects) {
    if (width <= 0 || height <= 0 ||
        pixels.size() != static_cast<std::size_t>(width) * height * 3)
        throw input_error("rotate90: pixel buffer size mismatch");
    RotatedChip out;
    out.width = height;
    out.height = width;
    out.pixels.resize(pixels.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int nx = height - 1 - y;
            const int ny = x;
            const std::size_t src = (static_cast<std::size_t>(y) * width + x) * 3;
            const std::size_t dst = (static_cast<std::size_t>(ny) * out.width + nx) * 3;
            out.pixels[dst] = pixels[src];
            out.pixels[dst + 1] = pixels[src + 1];
            out.pixels[dst + 2] = pixels[src + 2];
        }
    }
    out.objects.reserve(objects.size());
    for (const auto& o : objects) {
        VocObject r = o;
        r.bbox = {height - o.bbox.max_y, o.bbox.min_x, height - o.bbox.min_y, o.bbox.max_x};
        out.objects.push_back(r);
    }
    return out;
}

TrainingManifest balance_classes(TrainingManifest manifest, long target) {
    auto counts = manifest.class_counts();
    for (const LaneLabel label : schema_labels(manifest.schema)) {
        if (!counts.contains(label))
            manifest.warnings.push_back(std::string("class '") + label_name(label) +
                                        "' has no features; left empty");
    }
    if (counts.empty()) return manifest;

    // Target defaults to the lower median of the classes that exist.
    if (target < 0) {
        std::vector<long> values;
        for (const auto& [label, n] : counts) values.push_back(n);
        std::sort(values.begin(), values.end());
        target = values[(values.size() - 1) / 2];
    }

    for (const auto& [label, n] : counts) {
        long have = n;
        if (have >= target) continue;
        // Cycle through the original chips that carry this class.
        std::vector<std::size_t> carriers;
        const std::size_t original = manifest.chips.size();
        for (std::size_t i = 0; i < original; ++i) {
            for (const auto& o : manifest.chips[i].objects) {
                if (o.label == label) {
                    carriers.push_back(i);
                    break;
                }
            }
        }
        std::size_t next = 0;
        int copy = 1;
        while (have < target && !carriers.empty()) {
            TrainingChip dup = manifest.chips[carriers[next]];
            dup.chip_id += "_dup" + std::to_string(copy);
            dup.rotate_flag = true;
            long gained = 0;
            for (const auto& o : dup.objects)
                if (o.label == label) ++gained;
            manifest.chips.push_back(std::move(dup));
            have += gained;
            next = (next + 1) % carriers.size();
            if (next == 0) ++copy;
        }
    }
    manifest.split.clear(); // any previous split no longer covers all chips
    return manifest;
}

void assign_split(TrainingManifest& manifest, std::uint64_t seed) {
    manifest.seed = seed;
    const std::size_t n = manifest.chips.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    // Explicit xorshift-based Fisher-Yates; identical on every platform.
    std::uint64_t state = seed ^ 0x9e3779b97f4a7c15ULL;
    auto next_rand = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(next_rand() % i);
        std::swap(order[i - 1], order[j]);
    }

    manifest.split.assign(n, SplitSet::test);
    const std::size_t n_train = static_cast<std::size_t>(std::floor(0.70 * static_cast<double>(n)));
    const std::size_t n_val = static_cast<std::size_t>(std::floor(0.15 * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            manifest.split[order[i]] = SplitSet::train;
        else if (i < n_train + n_val)
            manifest.split[order[i]] = SplitSet::validation;
    }
}

void write_training_set(const std::string& dir, const TrainingManifest& manifest) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& c : manifest.chips) {
        const auto png = (fs::path(dir) / (c.chip_id + ".png")).string();
        const auto xml = (fs::path(dir) / (c.chip_id + ".xml")).string();
        if (c.rotate_flag) {
            const auto r = rotate90(c.pixels, c.chip_size, c.chip_size, c.objects);
            raster::write_png_rgb8(png, r.width, r.height, r.pixels);
            TrainingChip rotated = c;
            rotated.objects = r.objects;
            std::ofstream out(xml);
            out << voc_xml(rotated, c.chip_id + ".png");
        } else {
            raster::write_png_rgb8(png, c.chip_size, c.chip_size, c.pixels);
            std::ofstream out(xml);
            out << voc_xml(c, c.chip_id + ".png");
        }
    }
    std::ofstream manifest_out((fs::path(dir) / "manifest.csv").string());
    write_manifest_csv(manifest_out, manifest);
}

void write_manifest_csv(std::ostream& out, const TrainingManifest& manifest) {
    out << "chip_id,tile_id,window_col,window_row,chip_size,objects,rotate_flag,split\n";
    for (std::size_t i = 0; i < manifest.chips.size(); ++i) {
        const auto& c = manifest.chips[i];
        out << csv::escape(c.chip_id) << ',' << csv::escape(c.tile_id) << ',' << c.window_col
            << ',' << c.window_row << ',' << c.chip_size << ',' << c.objects.size() << ','
            << (c.rotate_flag ? 1 : 0) << ','
            << (i < manifest.split.size() ? split_name(manifest.split[i]) : "unassigned") << '\n';
    }
}

} // namespace lanemark::trainprep
