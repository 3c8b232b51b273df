#pragma once

#include "lanemark/aggregate.hpp"
#include "lanemark/geo.hpp"
#include "lanemark/labels.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lanemark::evaluate {

/// Manually placed reference point; label is always a positive class.
struct GroundTruthPoint {
    geo::WorldPoint location;
    LaneLabel label{LaneLabel::left_only};
};

struct MatchCounts {
    long gt_total{0};
    long model_total{0};
    long tp{0};
    long fp{0};
    long fn{0};
};

/// Metrics in percent. An empty optional is the in-band N/A marker for a
/// division by zero (e.g. correctness with zero detections).
struct MetricsRow {
    double confidence_floor{0.0};
    MatchCounts counts;
    std::optional<double> completeness; // (GT-FN)/GT, recall
    std::optional<double> correctness;  // (M-FP)/M, precision
    std::optional<double> quality;      // (GT-FN)/(GT+FP)
    std::optional<double> f1;           // harmonic mean of the two above
};

inline constexpr std::array<double, 5> kDefaultSweepFloors{0.75, 0.50, 0.25, 0.10, 0.05};

/// Greedy one-to-one matching for one class at one confidence floor.
/// Detections (confidence >= floor) claim, in descending-confidence order,
/// one unclaimed GT point inside their bbox, nearest to the bbox center
/// when several qualify. Guarantees tp + fp = M and tp + fn = GT.
MatchCounts match_class(const std::vector<GroundTruthPoint>& gt,
                        const std::vector<aggregate::WorldDetection>& detections,
                        LaneLabel cls, double conf_floor);

MetricsRow metrics(const MatchCounts& counts, double confidence_floor = 0.0);

std::vector<MetricsRow> sweep(const std::vector<GroundTruthPoint>& gt,
                              const std::vector<aggregate::WorldDetection>& detections,
                              LaneLabel cls,
                              const std::vector<double>& floors = {kDefaultSweepFloors.begin(),
                                                                   kDefaultSweepFloors.end()});

struct ClassSweep {
    std::string model;
    LaneLabel cls{LaneLabel::left_only};
    std::vector<MetricsRow> rows;
};

/// Long-format CSV: model, class, confidence_floor, tp, fp, fn,
/// completeness, correctness, quality, f1. One line per MetricsRow.
std::string emit_circus_csv(const std::vector<ClassSweep>& sweeps);

/// Wide table per class: Class, Confidence, M, TP, FP, FN, Completeness,
/// Correctness, Quality, F1. Percentages print with 2 decimals, N/A in-band.
void write_metrics_csv(std::ostream& out, const std::vector<ClassSweep>& sweeps);

/// A turn lane reconstructed from consecutive arrow features.
struct LaneGroup {
    LaneLabel label{LaneLabel::left_only};
    std::vector<std::size_t> members; // indices into the input points
};

/// Optional post-pass clustering same-class detection points into lanes:
/// single-linkage chaining within `gap` feet, split where a member strays
/// more than `lateral_tol` feet off the cluster's fitted axis. A heuristic
/// reconstruction only; feature-level metrics above never use it.
std::vector<LaneGroup> group_lanes(const std::vector<aggregate::DetectionPoint>& points,
                                   double gap = 60.0, double lateral_tol = 6.0);

} // namespace lanemark::evaluate
