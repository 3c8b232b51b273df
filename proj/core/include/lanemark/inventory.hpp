#pragma once

#include "lanemark/aggregate.hpp"
#include "lanemark/geo.hpp"
#include "lanemark/labels.hpp"
#include "lanemark/preprocess.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lanemark::inventory {

/// Detection point classified by maintaining road system. Empty optional
/// means no centerline lay within the buffer radius (warned, kept).
struct InventoryRecord {
    aggregate::DetectionPoint point;
    std::optional<geo::RoadSystem> road_system;
};

/// Road system of the nearest centerline within `buffer_radius` of the
/// point. Exact distance ties resolve to State. nullopt when nothing is in
/// range.
std::optional<geo::RoadSystem> assign_road_system(const aggregate::DetectionPoint& p,
                                                  const std::vector<geo::RoadCenterline>& lines,
                                                  double buffer_radius = preprocess::kDefaultBufferRadiusFt);

/// Same, but against a prebuilt grid (bulk classification).
std::optional<geo::RoadSystem> assign_road_system(const aggregate::DetectionPoint& p,
                                                  const preprocess::SegmentGrid& grid,
                                                  const std::vector<geo::RoadCenterline>& lines);

struct CountRow {
    LaneLabel cls{LaneLabel::left_only};
    double confidence_floor{0.0};
    long state{0};
    long local{0};
    long total{0};
};

/// Cumulative counts (confidence >= floor) per class and road system.
/// Rows are ordered left_only, right_only, center x floors descending;
/// unclassified records are excluded.
std::vector<CountRow> count_table(const std::vector<InventoryRecord>& records,
                                  const std::vector<double>& floors);

void write_count_csv(std::ostream& out, const std::vector<CountRow>& rows);

/// Attribute file: CSV with header label,confidence,road_system.
std::vector<InventoryRecord> read_attribute_csv(std::istream& in);

/// Everything the pipeline needs. Defaults assume 0.5 ft/px imagery:
/// 100 ft buffer, 256/128/56 chip geometry, 0.05 confidence floor,
/// 0.10 overlap floor.
struct PipelineConfig {
    double buffer_radius{100.0};
    int chip_size{256};
    int stride{128};
    int pad{56};
    double confidence_floor{0.05};
    double overlap_floor{0.10};
    std::vector<double> sweep_floors{0.75, 0.50, 0.25, 0.10, 0.05};
    Schema schema{Schema::four_class};
    std::string detector_engine{"reference"};
    double score_floor{0.80};
    aggregate::OverlapMetric overlap_metric{aggregate::OverlapMetric::iou};
    unsigned threads{1};
    bool dump_chips{false};
    bool group_lanes{false}; // heuristic lane reconstruction in the report
    double lane_gap{60.0};   // max feet between consecutive lane features

    std::string tiles_dir;
    std::string centerlines_path;
    std::string ground_truth_path; // optional; enables the eval stage
    std::string templates_dir;     // optional; overrides built-in stencils
    std::string out_dir;

    void validate() const;
    static PipelineConfig from_json_file(const std::string& path);
};

} // namespace lanemark::inventory
