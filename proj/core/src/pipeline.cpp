#include "lanemark/pipeline.hpp"

#include "lanemark/chip.hpp"
#include "lanemark/csv.hpp"
#include "lanemark/detect.hpp"
#include "lanemark/errors.hpp"
#include "lanemark/evaluate.hpp"
#include "lanemark/geojson.hpp"
#include "lanemark/parallel.hpp"
#include "lanemark/preprocess.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace lanemark::pipeline {

namespace fs = std::filesystem;

namespace {

struct Paths {
    fs::path out;
    fs::path masked_dir;
    fs::path chips_dir;
    fs::path mask_manifest;
    fs::path chip_manifest;
    fs::path model_card;
    fs::path detections_raw;
    fs::path detections_geojson;
    fs::path detections_csv;
    fs::path points_geojson;
    fs::path points_csv;
    fs::path inventory_geojson;
    fs::path inventory_csv;
    fs::path count_table;
    fs::path metrics_csv;
    fs::path circus_csv;

    explicit Paths(const inventory::PipelineConfig& cfg) : out(cfg.out_dir) {
        masked_dir = out / "masked";
        chips_dir = out / "chips";
        mask_manifest = out / "mask_manifest.csv";
        chip_manifest = out / "chip_manifest.csv";
        model_card = out / "model_card.json";
        detections_raw = out / "detections_raw.geojson";
        detections_geojson = out / "detections.geojson";
        detections_csv = out / "detections.csv";
        points_geojson = out / "points.geojson";
        points_csv = out / "points.csv";
        inventory_geojson = out / "inventory.geojson";
        inventory_csv = out / "inventory.csv";
        count_table = out / "count_table.csv";
        metrics_csv = out / "metrics.csv";
        circus_csv = out / "circus.csv";
    }
};

std::vector<std::string> list_tile_pngs(const std::string& dir) {
    if (!fs::is_directory(dir)) throw input_error("tiles dir '" + dir + "' does not exist");
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png" &&
            entry.path().stem().string().find("_mask") == std::string::npos)
            paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

std::vector<detect::ArrowTemplate> load_templates(const inventory::PipelineConfig& cfg) {
    if (cfg.templates_dir.empty()) return detect::builtin_templates(cfg.schema);
    if (!fs::is_directory(cfg.templates_dir))
        throw input_error("templates dir '" + cfg.templates_dir + "' does not exist");
    std::vector<std::string> pngs;
    for (const auto& entry : fs::directory_iterator(cfg.templates_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            pngs.push_back(entry.path().string());
    }
    std::sort(pngs.begin(), pngs.end());
    std::vector<detect::ArrowTemplate> templates;
    for (const auto& png : pngs)
        templates.push_back(detect::load_template(png, raster::sibling_path(png, ".json")));
    if (templates.empty())
        throw input_error("templates dir '" + cfg.templates_dir + "' holds no PNG stencils");
    return templates;
}

std::unique_ptr<detect::Detector> build_detector(const inventory::PipelineConfig& cfg) {
    if (cfg.detector_engine == "reference")
        return std::make_unique<detect::ReferenceDetector>(load_templates(cfg), cfg.score_floor);
    return detect::make_detector(cfg.detector_engine, cfg.schema, cfg.score_floor);
}

raster::MaskedTile load_masked_tile(const preprocess::MaskManifestRow& row) {
    raster::MaskedTile masked;
    masked.tile = raster::read_tile(row.path, row.tile_id);
    const auto mask_png = raster::read_png_gray8(
        (fs::path(row.path).parent_path() / (fs::path(row.path).stem().string() + "_mask.png"))
            .string());
    if (mask_png.width != masked.tile.width || mask_png.height != masked.tile.height)
        throw input_error("mask size mismatch for tile '" + row.tile_id + "'");
    masked.mask.resize(mask_png.pixels.size());
    for (std::size_t i = 0; i < mask_png.pixels.size(); ++i)
        masked.mask[i] = mask_png.pixels[i] >= 128 ? 1 : 0;
    return masked;
}

std::vector<preprocess::MaskManifestRow> load_mask_manifest(const Paths& paths) {
    std::ifstream in(paths.mask_manifest);
    if (!in)
        throw input_error("mask manifest '" + paths.mask_manifest.string() +
                          "' not found; run the mask stage first");
    return preprocess::read_mask_manifest(in);
}

template <typename Fn>
auto staged(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const stage_error&) {
        throw;
    } catch (const std::exception& e) {
        throw stage_error(stage, e.what());
    }
}

} // namespace

void run_mask(const inventory::PipelineConfig& config, RunSummary& summary) {
    staged("mask", [&] {
        const Paths paths(config);
        fs::create_directories(paths.masked_dir);
        const auto lines = geojson::read_centerlines(config.centerlines_path);
        const auto tile_paths = list_tile_pngs(config.tiles_dir);
        summary.tiles_found = tile_paths.size();

        std::vector<preprocess::TileFootprint> footprints;
        for (const auto& p : tile_paths) {
            const auto [w, h] = raster::read_png_size(p);
            raster::RasterTile probe;
            probe.width = w;
            probe.height = h;
            probe.transform = raster::read_world_file(raster::sibling_path(p, ".wld"));
            footprints.push_back({fs::path(p).stem().string(), probe.footprint()});
        }
        const auto selected = preprocess::select_tiles(footprints, lines, config.buffer_radius);
        summary.tiles_selected = selected.size();

        std::vector<preprocess::MaskManifestRow> rows(selected.size());
        parallel_for(selected.size(), config.threads, [&](std::size_t i) {
            const auto it =
                std::find_if(tile_paths.begin(), tile_paths.end(), [&](const std::string& p) {
                    return fs::path(p).stem().string() == selected[i];
                });
            const auto tile = raster::read_tile(*it);
            const auto masked = preprocess::mask_tile(tile, lines, config.buffer_radius);
            const auto out_png = (paths.masked_dir / (tile.tile_id + ".png")).string();
            raster::write_tile(out_png, masked.tile, &masked.mask);
            rows[i] = {tile.tile_id, out_png, tile.width, tile.height, masked.retained_count()};
        });

        std::ofstream manifest(paths.mask_manifest);
        preprocess::write_mask_manifest(manifest, rows);
        for (const auto& r : rows) summary.retained_pixels += r.retained_pixel_count;
        return 0;
    });
}

void run_chips(const inventory::PipelineConfig& config, RunSummary& summary) {
    staged("chips", [&] {
        const Paths paths(config);
        const auto manifest = load_mask_manifest(paths);
        if (config.dump_chips) fs::create_directories(paths.chips_dir);

        std::ofstream out(paths.chip_manifest);
        out << "tile_id,window_col,window_row,path\n";
        for (const auto& row : manifest) {
            const auto plans = chip::plan_chips(row.tile_id, row.width, row.height,
                                                config.chip_size, config.stride, config.pad);
            raster::MaskedTile masked;
            if (config.dump_chips) masked = load_masked_tile(row);
            for (const auto& plan : plans) {
                std::string chip_path;
                if (config.dump_chips) {
                    const auto c = chip::extract_chip(masked, plan);
                    chip_path = (paths.chips_dir /
                                 (plan.tile_id + "_" + std::to_string(plan.window_col) + "_" +
                                  std::to_string(plan.window_row) + ".png"))
                                    .string();
                    raster::write_png_rgb8(chip_path, plan.outer_size(), plan.outer_size(),
                                           c.pixels);
                }
                out << csv::escape(plan.tile_id) << ',' << plan.window_col << ','
                    << plan.window_row << ',' << csv::escape(chip_path) << '\n';
                ++summary.chips_planned;
            }
        }
        return 0;
    });
}

void run_detect(const inventory::PipelineConfig& config, RunSummary& summary) {
    staged("detect", [&] {
        const Paths paths(config);
        const auto manifest = load_mask_manifest(paths);
        const auto detector = build_detector(config);

        {
            std::ofstream card(paths.model_card);
            card << detect::model_card_json();
        }

        std::vector<std::vector<aggregate::WorldDetection>> per_tile(manifest.size());
        parallel_for(manifest.size(), config.threads, [&](std::size_t i) {
            const auto masked = load_masked_tile(manifest[i]);
            const auto plans =
                chip::plan_chips(masked.tile.tile_id, masked.tile.width, masked.tile.height,
                                 config.chip_size, config.stride, config.pad);
            for (const auto& plan : plans) {
                const auto c = chip::extract_chip(masked, plan);
                for (const auto& d : detect::detect_chip(c, *detector)) {
                    if (d.confidence < config.confidence_floor) continue;
                    per_tile[i].push_back(aggregate::georeference(d, plan, masked.tile.transform));
                }
            }
        });

        std::vector<aggregate::WorldDetection> all;
        for (auto& v : per_tile)
            all.insert(all.end(), std::make_move_iterator(v.begin()),
                       std::make_move_iterator(v.end()));
        summary.raw_detections = all.size();
        geojson::write_detections(paths.detections_raw.string(), all);
        return 0;
    });
}

void run_dedup(const inventory::PipelineConfig& config, RunSummary& summary) {
    staged("dedup", [&] {
        const Paths paths(config);
        auto raw = geojson::read_detections(paths.detections_raw.string());
        const auto kept = aggregate::dedup(std::move(raw), config.overlap_floor,
                                           config.overlap_metric);
        summary.detections = kept.size();
        geojson::write_detections(paths.detections_geojson.string(), kept);
        geojson::write_detections_csv(paths.detections_csv.string(), kept);
        return 0;
    });
}

void run_points(const inventory::PipelineConfig& config, RunSummary& summary) {
    staged("points", [&] {
        const Paths paths(config);
        const auto detections = geojson::read_detections(paths.detections_geojson.string());
        const auto points = aggregate::to_points(detections);
        summary.points = points.size();
        geojson::write_points(paths.points_geojson.string(), points);
        geojson::write_points_csv(paths.points_csv.string(), points);
        return 0;
    });
}

void run_eval(const inventory::PipelineConfig& config, RunSummary& summary) {
    staged("eval", [&] {
        const Paths paths(config);
        if (config.ground_truth_path.empty())
            throw input_error("eval stage requires a ground-truth path");
        auto gt = geojson::read_ground_truth(config.ground_truth_path);
        auto detections = geojson::read_detections(paths.detections_geojson.string());

        // Both sides restricted to the active schema.
        if (config.schema == Schema::four_class) {
            for (auto& d : detections) d.label = project_to_4class(d.label);
        }
        std::erase_if(detections,
                      [](const aggregate::WorldDetection& d) { return d.label == LaneLabel::none; });
        std::erase_if(gt, [&](const evaluate::GroundTruthPoint& g) {
            return !in_schema(g.label, config.schema);
        });

        std::vector<evaluate::ClassSweep> sweeps;
        for (const LaneLabel cls : positive_labels(config.schema)) {
            const bool in_gt = std::any_of(gt.begin(), gt.end(),
                                           [&](const auto& g) { return g.label == cls; });
            const bool in_ds = std::any_of(detections.begin(), detections.end(),
                                           [&](const auto& d) { return d.label == cls; });
            if (!in_gt && !in_ds) continue;
            evaluate::ClassSweep s;
            s.model = schema_name(config.schema);
            s.cls = cls;
            s.rows = evaluate::sweep(gt, detections, cls, config.sweep_floors);
            sweeps.push_back(std::move(s));
        }

        std::ofstream metrics(paths.metrics_csv);
        evaluate::write_metrics_csv(metrics, sweeps);
        std::ofstream circus(paths.circus_csv);
        circus << evaluate::emit_circus_csv(sweeps);
        summary.evaluated = true;
        return 0;
    });
}

void run_report(const inventory::PipelineConfig& config, RunSummary& summary) {
    staged("report", [&] {
        const Paths paths(config);
        const auto points = geojson::read_points(paths.points_geojson.string());
        const auto lines = geojson::read_centerlines(config.centerlines_path);

        std::vector<inventory::InventoryRecord> records;
        records.reserve(points.size());
        for (const auto& p : points) {
            inventory::InventoryRecord rec;
            rec.point = p;
            rec.road_system = inventory::assign_road_system(p, lines, config.buffer_radius);
            if (!rec.road_system) {
                ++summary.unclassified_records;
                std::cerr << "warning: point (" << p.location.x << ", " << p.location.y
                          << ") has no centerline within " << config.buffer_radius
                          << " ft; left unclassified\n";
            }
            records.push_back(std::move(rec));
        }
        summary.inventory_records = records.size();
        geojson::write_inventory(paths.inventory_geojson.string(), records);
        geojson::write_inventory_csv(paths.inventory_csv.string(), records);

        std::ofstream counts(paths.count_table);
        inventory::write_count_csv(counts, inventory::count_table(records, config.sweep_floors));

        if (config.group_lanes) {
            const auto lanes = evaluate::group_lanes(points, config.lane_gap);
            std::ofstream out(paths.out / "lanes.csv");
            out << "lane_id,label,feature_count,min_confidence\n";
            for (std::size_t i = 0; i < lanes.size(); ++i) {
                double min_conf = 1.0;
                for (const auto m : lanes[i].members)
                    min_conf = std::min(min_conf, points[m].confidence);
                out << i << ',' << label_name(lanes[i].label) << ',' << lanes[i].members.size()
                    << ',' << csv::format(min_conf, 6) << '\n';
            }
        }
        return 0;
    });
}

RunSummary run_pipeline(const inventory::PipelineConfig& config) {
    config.validate();
    fs::create_directories(config.out_dir);
    RunSummary summary;
    run_mask(config, summary);
    run_chips(config, summary);
    run_detect(config, summary);
    run_dedup(config, summary);
    run_points(config, summary);
    if (!config.ground_truth_path.empty()) run_eval(config, summary);
    run_report(config, summary);
    return summary;
}

} // namespace lanemark::pipeline
