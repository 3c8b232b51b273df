#include "lanemark/aggregate.hpp"

#include "lanemark/errors.hpp"

#include <algorithm>
#include <tuple>

namespace lanemark::aggregate {

OverlapMetric overlap_metric_from_string(const std::string& s) {
    if (s == "iou") return OverlapMetric::iou;
    if (s == "over_smaller") return OverlapMetric::over_smaller;
    throw input_error("unknown overlap metric '" + s + "' (expected iou|over_smaller)");
}

const char* overlap_metric_name(OverlapMetric m) {
    return m == OverlapMetric::iou ? "iou" : "over_smaller";
}

WorldDetection georeference(const detect::ChipDetection& d, const chip::ChipPlan& plan,
                            const geo::GeoTransform& t) {
    if (!t.valid()) throw input_error("georeference: invalid transform");
    if (d.bbox.min_x < 0 || d.bbox.min_y < 0 || d.bbox.max_x > plan.chip_size ||
        d.bbox.max_y > plan.chip_size || d.bbox.min_x >= d.bbox.max_x ||
        d.bbox.min_y >= d.bbox.max_y)
        throw input_error("georeference: bbox outside chip interior");

    const auto c1 = geo::pixel_to_world(plan.window_col + d.bbox.min_x,
                                        plan.window_row + d.bbox.min_y, t);
    const auto c2 = geo::pixel_to_world(plan.window_col + d.bbox.max_x,
                                        plan.window_row + d.bbox.max_y, t);
    WorldDetection out;
    out.label = d.label;
    out.bbox = {std::min(c1.x, c2.x), std::min(c1.y, c2.y), std::max(c1.x, c2.x),
                std::max(c1.y, c2.y)};
    out.confidence = d.confidence;
    out.source = {plan.tile_id, plan.window_col, plan.window_row};
    return out;
}

namespace {

auto sort_key(const WorldDetection& d) {
    return std::make_tuple(-d.confidence, label_id(d.label), d.bbox.min_x, d.bbox.min_y,
                           d.bbox.max_x, d.bbox.max_y, d.source.tile_id, d.source.window_col,
                           d.source.window_row);
}

} // namespace

std::vector<WorldDetection> dedup(std::vector<WorldDetection> detections, double overlap_floor,
                                  OverlapMetric metric) {
    if (!(overlap_floor > 0.0 && overlap_floor <= 1.0))
        throw input_error("overlap_floor must lie in (0, 1]");

    std::sort(detections.begin(), detections.end(),
              [](const WorldDetection& a, const WorldDetection& b) {
                  return sort_key(a) < sort_key(b);
              });

    const auto overlap = metric == OverlapMetric::iou ? geo::overlap_ratio : geo::overlap_over_smaller;
    std::vector<WorldDetection> accepted;
    for (const auto& d : detections) {
        bool keep = true;
        for (const auto& a : accepted) {
            if (a.label != d.label) continue;
            if (overlap(a.bbox, d.bbox) > overlap_floor) {
                keep = false;
                break;
            }
        }
        if (keep) accepted.push_back(d);
    }
    return accepted;
}

std::vector<DetectionPoint> to_points(const std::vector<WorldDetection>& detections) {
    std::vector<DetectionPoint> points;
    points.reserve(detections.size());
    for (const auto& d : detections) {
        points.push_back({d.label, d.bbox.center(), d.confidence, d.source});
    }
    return points;
}

} // namespace lanemark::aggregate
