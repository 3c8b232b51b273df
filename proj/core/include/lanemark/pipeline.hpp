#pragma once

#include "lanemark/inventory.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lanemark::pipeline {

/// Per-run totals; every stage also leaves its manifest/artifacts under
/// config.out_dir so stages can be re-run independently.
struct RunSummary {
    std::size_t tiles_found{0};
    std::size_t tiles_selected{0};
    std::uint64_t retained_pixels{0};
    std::size_t chips_planned{0};
    std::size_t raw_detections{0};
    std::size_t detections{0};
    std::size_t points{0};
    std::size_t inventory_records{0};
    std::size_t unclassified_records{0};
    bool evaluated{false};
};

// Individual stages. Each reads its inputs from config paths or from the
// manifests a prior stage left in out_dir, and throws stage_error on
// failure (partial outputs stay on disk).
void run_mask(const inventory::PipelineConfig& config, RunSummary& summary);
void run_chips(const inventory::PipelineConfig& config, RunSummary& summary);
void run_detect(const inventory::PipelineConfig& config, RunSummary& summary);
void run_dedup(const inventory::PipelineConfig& config, RunSummary& summary);
void run_points(const inventory::PipelineConfig& config, RunSummary& summary);
void run_eval(const inventory::PipelineConfig& config, RunSummary& summary);
void run_report(const inventory::PipelineConfig& config, RunSummary& summary);

/// mask -> chips -> detect -> dedup -> points -> report (+ eval when a
/// ground-truth path is configured). Re-running on identical inputs yields
/// byte-identical artifacts.
RunSummary run_pipeline(const inventory::PipelineConfig& config);

} // namespace lanemark::pipeline
