#pragma once

#include "lanemark/chip.hpp"
#include "lanemark/detect.hpp"
#include "lanemark/geo.hpp"
#include "lanemark/labels.hpp"

#include <string>
#include <vector>

namespace lanemark::aggregate {

enum class OverlapMetric { iou, over_smaller };

OverlapMetric overlap_metric_from_string(const std::string& s);
const char* overlap_metric_name(OverlapMetric m);

struct DetectionSource {
    std::string tile_id;
    int window_col{0};
    int window_row{0};

    bool operator==(const DetectionSource&) const = default;
};

/// Detection in world coordinates; the pipeline's central record.
struct WorldDetection {
    LaneLabel label{LaneLabel::none};
    geo::WorldBox bbox;
    double confidence{0.0};
    DetectionSource source;
};

struct DetectionPoint {
    LaneLabel label{LaneLabel::none};
    geo::WorldPoint location; // bbox center
    double confidence{0.0};
    DetectionSource source;
};

/// Maps a chip-interior detection into world coordinates.
WorldDetection georeference(const detect::ChipDetection& d, const chip::ChipPlan& plan,
                            const geo::GeoTransform& t);

inline constexpr double kDefaultOverlapFloor = 0.10;

/// Greedy class-aware NMS. Detections sort by confidence descending (ties
/// by label id, bbox, then source) and one is accepted iff its overlap with
/// every already-accepted same-class detection is <= overlap_floor. Output
/// preserves acceptance order and is independent of input order.
std::vector<WorldDetection> dedup(std::vector<WorldDetection> detections,
                                  double overlap_floor = kDefaultOverlapFloor,
                                  OverlapMetric metric = OverlapMetric::iou);

/// One point per detection at its bbox center, order preserved.
std::vector<DetectionPoint> to_points(const std::vector<WorldDetection>& detections);

} // namespace lanemark::aggregate
