// lanemark CLI: stage-by-stage or end-to-end turning-lane inventory runs.
//
//   lanemark run    --tiles <dir> --centerlines <geojson> --out <dir> [...]
//   lanemark mask   ... / chips / detect / dedup / points / eval / report
//
// Every stage reads and writes manifests under --out, so stages can be
// re-run independently. Exit codes: 0 ok, 2 input error, 3 stage failure.

#include "lanemark/detect.hpp"
#include "lanemark/errors.hpp"
#include "lanemark/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>

namespace {

using lanemark::inventory::PipelineConfig;
using lanemark::pipeline::RunSummary;

struct CliOptions {
    std::string config_path;
    std::string tiles_dir;
    std::string centerlines;
    std::string ground_truth;
    std::string out_dir;
    std::string templates_dir;
    int schema = 0;
    double confidence_floor = -1.0;
    double overlap_floor = -1.0;
    double buffer_radius = -1.0;
    double score_floor = -2.0;
    int threads = 0;
    bool dump_chips = false;
    bool group_lanes = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file; flags override its values");
    cmd->add_option("--tiles", opt.tiles_dir, "Directory of input tiles (PNG + .wld world files)");
    cmd->add_option("--centerlines", opt.centerlines, "Road centerline GeoJSON");
    cmd->add_option("--gt", opt.ground_truth, "Ground-truth points GeoJSON (enables eval)");
    cmd->add_option("--schema", opt.schema, "Class schema: 4 or 12")
        ->check(CLI::IsMember({4, 12}));
    cmd->add_option("--confidence-floor", opt.confidence_floor,
                    "Minimum detection confidence admitted to outputs");
    cmd->add_option("--overlap-floor", opt.overlap_floor,
                    "Dedup keeps same-class boxes overlapping at most this much");
    cmd->add_option("--buffer-radius", opt.buffer_radius, "Centerline buffer radius in feet");
    cmd->add_option("--score-floor", opt.score_floor, "Reference detector correlation floor");
    cmd->add_option("--templates", opt.templates_dir, "Stencil directory (PNG + JSON sidecars)");
    cmd->add_option("--out", opt.out_dir, "Output directory");
    cmd->add_option("--threads", opt.threads, "Worker threads for the parallel-map stages");
    cmd->add_flag("--dump-chips", opt.dump_chips, "Write every planned chip as PNG");
    cmd->add_flag("--group-lanes", opt.group_lanes,
                  "Reconstruct lanes from consecutive features in the report");
}

PipelineConfig resolve_config(const CliOptions& opt) {
    PipelineConfig cfg;
    if (!opt.config_path.empty()) cfg = PipelineConfig::from_json_file(opt.config_path);
    if (!opt.tiles_dir.empty()) cfg.tiles_dir = opt.tiles_dir;
    if (!opt.centerlines.empty()) cfg.centerlines_path = opt.centerlines;
    if (!opt.ground_truth.empty()) cfg.ground_truth_path = opt.ground_truth;
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (!opt.templates_dir.empty()) cfg.templates_dir = opt.templates_dir;
    if (opt.schema != 0) cfg.schema = lanemark::schema_from_class_count(opt.schema);
    if (opt.confidence_floor >= 0.0) cfg.confidence_floor = opt.confidence_floor;
    if (opt.overlap_floor >= 0.0) cfg.overlap_floor = opt.overlap_floor;
    if (opt.buffer_radius >= 0.0) cfg.buffer_radius = opt.buffer_radius;
    if (opt.score_floor > -2.0) cfg.score_floor = opt.score_floor;
    if (opt.threads > 0) cfg.threads = static_cast<unsigned>(opt.threads);
    if (opt.dump_chips) cfg.dump_chips = true;
    if (opt.group_lanes) cfg.group_lanes = true;
    if (cfg.out_dir.empty()) throw lanemark::input_error("--out (or config out_dir) is required");
    cfg.validate();
    return cfg;
}

void print_summary(const RunSummary& s) {
    std::cout << "tiles: " << s.tiles_selected << "/" << s.tiles_found << " selected, "
              << s.retained_pixels << " pixels retained\n"
              << "chips planned: " << s.chips_planned << '\n'
              << "detections: " << s.raw_detections << " raw -> " << s.detections
              << " after dedup, " << s.points << " points\n"
              << "inventory: " << s.inventory_records << " records ("
              << s.unclassified_records << " unclassified)"
              << (s.evaluated ? ", metrics written" : "") << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turning-lane pavement marking inventory from aerial tiles"};
    app.require_subcommand(1);

    CliOptions opt;
    using StageFn = std::function<void(const PipelineConfig&, RunSummary&)>;
    const std::map<std::string, StageFn> stages = {
        {"mask", lanemark::pipeline::run_mask},
        {"chips", lanemark::pipeline::run_chips},
        {"detect", lanemark::pipeline::run_detect},
        {"dedup", lanemark::pipeline::run_dedup},
        {"points", lanemark::pipeline::run_points},
        {"eval", lanemark::pipeline::run_eval},
        {"report", lanemark::pipeline::run_report},
    };

    const std::map<std::string, std::string> stage_help = {
        {"mask", "Select tiles near centerlines and mask pixels beyond the buffer"},
        {"chips", "Plan detection windows over the masked tiles"},
        {"detect", "Run the per-chip detector and georeference its output"},
        {"dedup", "Suppress duplicate detections across overlapping chips"},
        {"points", "Convert detection polygons to center points"},
        {"eval", "Score detections against ground-truth points"},
        {"report", "Classify points by road system and build count tables"},
    };
    for (const auto& [name, fn] : stages) add_common_flags(app.add_subcommand(name, stage_help.at(name)), opt);
    add_common_flags(app.add_subcommand("run", "Full pipeline, all stages in order"), opt);
    auto* card = app.add_subcommand("model-card", "Print the recorded detector model card");

    CLI11_PARSE(app, argc, argv);

    try {
        if (card->parsed()) {
            std::cout << lanemark::detect::model_card_json();
            return 0;
        }
        const PipelineConfig cfg = resolve_config(opt);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "run") {
            print_summary(lanemark::pipeline::run_pipeline(cfg));
        } else {
            std::filesystem::create_directories(cfg.out_dir);
            RunSummary summary;
            stages.at(sub)(cfg, summary);
            std::cout << sub << ": done\n";
        }
    } catch (const lanemark::stage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const lanemark::input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
