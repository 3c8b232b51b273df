#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lanemark/errors.hpp"
#include "lanemark/trainprep.hpp"

#include "support/fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace lanemark;
using namespace lanemark::trainprep;

namespace {

// Tile with origin (0, H*px) so tile pixel (x, y) sits at world (x*px, (H-y)*px).
raster::RasterTile grid_tile(const std::string& id, int w, int h) {
    auto mt = fixtures::make_tile(id, w, h, {0.0, h * 0.5, 0.5});
    return mt.tile;
}

LabeledFeature feature(LaneLabel label, const std::string& tile, double px_min_x, double px_min_y,
                       double px_max_x, double px_max_y, const raster::RasterTile& t) {
    // World box from pixel corners.
    const auto tl = geo::pixel_to_world(px_min_x, px_min_y, t.transform);
    const auto br = geo::pixel_to_world(px_max_x, px_max_y, t.transform);
    return {label, {tl.x, br.y, br.x, tl.y}, tile};
}

} // namespace

TEST_CASE("one contained feature yields one chip with one VOC object") {
    const auto tile = grid_tile("a", 512, 512);
    const auto f = feature(LaneLabel::left_only, "a", 30, 40, 60, 80, tile);
    const auto manifest = export_chips({tile}, {f});
    REQUIRE(manifest.chips.size() == 1);
    REQUIRE(manifest.chips[0].objects.size() == 1);
    CHECK(manifest.chips[0].objects[0].label == LaneLabel::left_only);
    CHECK(manifest.chips[0].objects[0].bbox == detect::PixelBox{30, 40, 60, 80});
    CHECK(manifest.warnings.empty());

    const auto xml = voc_xml(manifest.chips[0], manifest.chips[0].chip_id + ".png");
    const auto back = parse_voc(xml);
    CHECK(back.width == 256);
    CHECK(back.height == 256);
    REQUIRE(back.objects.size() == 1);
    CHECK(back.objects[0].bbox == manifest.chips[0].objects[0].bbox);
}

TEST_CASE("two adjacent features share one chip with two objects") {
    const auto tile = grid_tile("a", 512, 512);
    const auto f1 = feature(LaneLabel::left_only, "a", 30, 40, 60, 80, tile);
    const auto f2 = feature(LaneLabel::right_only, "a", 70, 40, 100, 80, tile);
    const auto manifest = export_chips({tile}, {f1, f2});
    REQUIRE(manifest.chips.size() == 1);
    CHECK(manifest.chips[0].objects.size() == 2);
}

TEST_CASE("every emitted VOC file parses back to the exact labels") {
    const auto tile = grid_tile("a", 1024, 1024);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pos(0, 980);
    std::uniform_int_distribution<int> ext(4, 40);
    std::uniform_int_distribution<int> lab(1, 12);
    std::vector<LabeledFeature> features;
    for (int i = 0; i < 60; ++i) {
        const int x = pos(rng), y = pos(rng);
        features.push_back(feature(static_cast<LaneLabel>(lab(rng)), "a", x, y,
                                   std::min(x + ext(rng), 1024), std::min(y + ext(rng), 1024),
                                   tile));
    }
    const auto manifest = export_chips({tile}, {features}, 256, Schema::twelve_class);
    CHECK(!manifest.chips.empty());
    for (const auto& chip : manifest.chips) {
        const auto filename = chip.chip_id + ".png";
        const auto back = parse_voc(voc_xml(chip, filename));
        CHECK(back.filename == filename);
        REQUIRE(back.objects.size() == chip.objects.size());
        for (std::size_t i = 0; i < chip.objects.size(); ++i) {
            CHECK(back.objects[i].label == chip.objects[i].label);
            CHECK(back.objects[i].bbox == chip.objects[i].bbox);
        }
    }
}

TEST_CASE("oversize features are clipped with a warning") {
    const auto tile = grid_tile("a", 512, 512);
    const auto f = feature(LaneLabel::merge, "a", 10, 10, 330, 300, tile); // > 256 both ways
    const auto manifest = export_chips({tile}, {f}, 256, Schema::twelve_class);
    REQUIRE(manifest.chips.size() == 1);
    REQUIRE(manifest.chips[0].objects.size() == 1);
    const auto& b = manifest.chips[0].objects[0].bbox;
    CHECK(b.width() <= 256);
    CHECK(b.height() <= 256);
    REQUIRE(manifest.warnings.size() == 1);
    CHECK(manifest.warnings[0].find("clipped") != std::string::npos);
}

TEST_CASE("chip pixels copy the tile window") {
    auto masked = fixtures::make_tile("a", 512, 512, {0.0, 256.0, 0.5});
    for (std::size_t i = 0; i < masked.tile.pixels.size(); i += 3)
        masked.tile.pixels[i] = static_cast<std::uint8_t>((i / 3) % 256);
    const auto f = feature(LaneLabel::center, "a", 300, 300, 340, 330, masked.tile);
    const auto manifest = export_chips({masked.tile}, {f});
    REQUIRE(manifest.chips.size() == 1);
    const auto& c = manifest.chips[0];
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            const auto ci = (static_cast<std::size_t>(y) * 256 + x) * 3;
            const auto ti = masked.tile.pixel_index(c.window_col + x, c.window_row + y);
            REQUIRE(c.pixels[ci] == masked.tile.pixels[ti]);
        }
    }
}

TEST_CASE("rotate90 maps a centered square box to itself in a square chip") {
    std::vector<std::uint8_t> pixels(16 * 16 * 3, 0);
    const std::vector<VocObject> objects = {{LaneLabel::center, {6, 6, 10, 10}}};
    const auto rotated = rotate90(pixels, 16, 16, objects);
    CHECK(rotated.objects[0].bbox == objects[0].bbox);
}

TEST_CASE("four rotations return the original chip and labels exactly") {
    std::mt19937 rng(11);
    std::vector<std::uint8_t> pixels(24 * 16 * 3);
    for (auto& p : pixels) p = static_cast<std::uint8_t>(rng() % 256);
    const std::vector<VocObject> objects = {{LaneLabel::left_only, {3, 2, 9, 7}},
                                            {LaneLabel::u_turn, {10, 0, 24, 16}}};
    auto r = rotate90(pixels, 24, 16, objects);
    for (int i = 0; i < 3; ++i) r = rotate90(r.pixels, r.width, r.height, r.objects);
    CHECK(r.width == 24);
    CHECK(r.height == 16);
    CHECK(r.pixels == pixels);
    REQUIRE(r.objects.size() == 2);
    for (std::size_t i = 0; i < objects.size(); ++i) {
        CHECK(r.objects[i].label == objects[i].label);
        CHECK(r.objects[i].bbox == objects[i].bbox);
    }
}

TEST_CASE("rotate90 per-pixel check against the index-remapping oracle") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 16, h = 16;
        std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h * 3);
        for (auto& p : pixels) p = static_cast<std::uint8_t>(rng() % 256);
        const auto rotated = rotate90(pixels, w, h, {});
        REQUIRE(rotated.width == h);
        REQUIRE(rotated.height == w);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                // Clockwise: source (x, y) lands at (h-1-y, x).
                const auto src = (static_cast<std::size_t>(y) * w + x) * 3;
                const auto dst =
                    (static_cast<std::size_t>(x) * rotated.width + (h - 1 - y)) * 3;
                REQUIRE(rotated.pixels[dst] == pixels[src]);
                REQUIRE(rotated.pixels[dst + 1] == pixels[src + 1]);
                REQUIRE(rotated.pixels[dst + 2] == pixels[src + 2]);
            }
        }
    }
}

TEST_CASE("rotated boxes stay within bounds and rotate with their pixels") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> pos(0, 12);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 20, h = 14;
        const int x1 = pos(rng) % w, y1 = pos(rng) % h;
        const VocObject o{LaneLabel::center,
                          {x1, y1, std::min(x1 + 1 + pos(rng), w), std::min(y1 + 1 + pos(rng), h)}};
        const auto r = rotate90(std::vector<std::uint8_t>(w * h * 3, 0), w, h, {o});
        const auto& b = r.objects[0].bbox;
        CHECK(b.min_x >= 0);
        CHECK(b.min_y >= 0);
        CHECK(b.max_x <= r.width);
        CHECK(b.max_y <= r.height);
        CHECK(b.width() == o.bbox.height());
        CHECK(b.height() == o.bbox.width());
    }
}

namespace {

TrainingManifest manifest_with_counts(const std::vector<std::pair<LaneLabel, long>>& counts) {
    TrainingManifest m;
    int id = 0;
    for (const auto& [label, n] : counts) {
        for (long i = 0; i < n; ++i) {
            TrainingChip c;
            c.chip_id = "c" + std::to_string(id++);
            c.tile_id = "t";
            c.chip_size = 256;
            c.objects.push_back({label, {0, 0, 10, 10}});
            m.chips.push_back(std::move(c));
        }
    }
    return m;
}

} // namespace

TEST_CASE("balance duplicates the rare class toward the median") {
    auto m = manifest_with_counts({{LaneLabel::left_only, 100},
                                   {LaneLabel::right_only, 100},
                                   {LaneLabel::center, 10}});
    const auto balanced = balance_classes(m);
    const auto counts = balanced.class_counts();
    CHECK(counts.at(LaneLabel::left_only) == 100);
    CHECK(counts.at(LaneLabel::right_only) == 100);
    CHECK(counts.at(LaneLabel::center) == 100);
    // Duplicates carry the rotation flag; originals do not.
    long flagged = 0;
    for (const auto& c : balanced.chips)
        if (c.rotate_flag) ++flagged;
    CHECK(flagged == 90);
    for (std::size_t i = 0; i < m.chips.size(); ++i) CHECK(!balanced.chips[i].rotate_flag);
}

TEST_CASE("an already balanced manifest is unchanged") {
    auto m = manifest_with_counts({{LaneLabel::left_only, 50}, {LaneLabel::center, 50}});
    const auto balanced = balance_classes(m);
    CHECK(balanced.chips.size() == m.chips.size());
    for (const auto& c : balanced.chips) CHECK(!c.rotate_flag);
}

TEST_CASE("a long-tailed class distribution balances to the independently computed median") {
    // Long-tailed per-class feature counts, one rare class far below the rest.
    const std::vector<std::pair<LaneLabel, long>> counts = {
        {LaneLabel::left_only, 3021},  {LaneLabel::right_only, 2179},
        {LaneLabel::left_through, 1627}, {LaneLabel::right_through, 1583},
        {LaneLabel::through, 2233},    {LaneLabel::left_right_through, 920},
        {LaneLabel::bicycle, 3230},    {LaneLabel::center, 3043},
        {LaneLabel::left_right, 159},  {LaneLabel::merge, 2262},
        {LaneLabel::u_turn, 632},      {LaneLabel::none, 2780},
    };
    // Independent target: lower median of the sorted counts.
    std::vector<long> sorted;
    for (const auto& [l, n] : counts) sorted.push_back(n);
    std::sort(sorted.begin(), sorted.end());
    const long median = sorted[(sorted.size() - 1) / 2];
    CHECK(median == 2179);

    auto balanced = balance_classes(manifest_with_counts(counts));
    const auto after = balanced.class_counts();
    for (const auto& [label, before] : counts) {
        if (before >= median) {
            CHECK(after.at(label) == before); // never reduced
        } else {
            CHECK(after.at(label) >= median); // duplicated up to the target
            // One object per chip here, so the count lands exactly.
            CHECK(after.at(label) == median);
        }
    }
    // left_right needed a ~13.7x duplication: 159 -> 2179.
    CHECK(after.at(LaneLabel::left_right) == 2179);
}

TEST_CASE("balance leaves empty classes empty with a warning") {
    auto m = manifest_with_counts({{LaneLabel::left_only, 10}});
    const auto balanced = balance_classes(m, 20);
    CHECK(balanced.class_counts().at(LaneLabel::left_only) == 20);
    // The other 4-class labels have no features and are warned about.
    REQUIRE(balanced.warnings.size() == 3);
    CHECK(balanced.warnings[0].find("right_only") != std::string::npos);
    CHECK(balanced.class_counts().count(LaneLabel::right_only) == 0);
}

TEST_CASE("split assignment is a seeded deterministic 70/15/15 partition") {
    auto m = manifest_with_counts({{LaneLabel::left_only, 100}});
    assign_split(m, 42);
    REQUIRE(m.split.size() == m.chips.size());
    long train = 0, val = 0, test = 0;
    for (const auto s : m.split) {
        if (s == SplitSet::train) ++train;
        if (s == SplitSet::validation) ++val;
        if (s == SplitSet::test) ++test;
    }
    CHECK(train == 70);
    CHECK(val == 15);
    CHECK(test == 15);
    CHECK(train + val + test == static_cast<long>(m.chips.size())); // partition

    auto m2 = manifest_with_counts({{LaneLabel::left_only, 100}});
    assign_split(m2, 42);
    CHECK(m2.split == m.split); // same seed, same assignment

    auto m3 = manifest_with_counts({{LaneLabel::left_only, 100}});
    assign_split(m3, 43);
    CHECK(m3.split != m.split);
}

TEST_CASE("manifest CSV lists chips with split assignment") {
    auto m = manifest_with_counts({{LaneLabel::left_only, 4}});
    assign_split(m, 1);
    std::ostringstream out;
    write_manifest_csv(out, m);
    const auto text = out.str();
    CHECK(text.find("chip_id,tile_id,window_col,window_row,chip_size,objects,rotate_flag,split\n") == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("write_training_set materializes PNGs, VOC files, and the manifest") {
    const auto dir = std::filesystem::temp_directory_path() / "lanemark_trainset";
    std::filesystem::remove_all(dir);
    const auto tile = grid_tile("a", 512, 512);
    auto manifest = export_chips(
        {tile}, {feature(LaneLabel::left_only, "a", 30, 40, 60, 80, tile),
                 feature(LaneLabel::center, "a", 300, 300, 340, 330, tile)});
    manifest = balance_classes(manifest, 2); // forces one rotate-flagged duplicate
    assign_split(manifest, 7);
    write_training_set(dir.string(), manifest);

    CHECK(std::filesystem::exists(dir / "manifest.csv"));
    for (const auto& c : manifest.chips) {
        CHECK(std::filesystem::exists(dir / (c.chip_id + ".png")));
        const auto xml_path = dir / (c.chip_id + ".xml");
        REQUIRE(std::filesystem::exists(xml_path));
        std::ifstream in(xml_path);
        const std::string xml((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
        const auto ann = parse_voc(xml);
        CHECK(ann.objects.size() == c.objects.size());
        // Rotated duplicates carry rotated boxes in their annotations.
        if (c.rotate_flag && !c.objects.empty())
            CHECK(ann.objects[0].bbox ==
                  rotate90(c.pixels, c.chip_size, c.chip_size, c.objects).objects[0].bbox);
    }
}

TEST_CASE("export rejects unknown tiles and out-of-schema labels") {
    const auto tile = grid_tile("a", 512, 512);
    CHECK_THROWS_AS(export_chips({tile}, {feature(LaneLabel::left_only, "missing", 0, 0, 9, 9, tile)}),
                    input_error);
    CHECK_THROWS_AS(export_chips({tile}, {feature(LaneLabel::u_turn, "a", 0, 0, 9, 9, tile)},
                                 256, Schema::four_class),
                    input_error);
}
