#pragma once

#include "lanemark/aggregate.hpp"
#include "lanemark/evaluate.hpp"
#include "lanemark/geo.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lanemark::inventory {
struct InventoryRecord;
}

namespace lanemark::geojson {

/// FeatureCollection of LineString/MultiLineString features with `id` and
/// `road_system` ("state"|"local") properties. MultiLineString parts become
/// separate centerlines with "/<part>" appended to the id.
std::vector<geo::RoadCenterline> read_centerlines(const std::string& path);
void write_centerlines(const std::string& path, const std::vector<geo::RoadCenterline>& lines);

/// Point features with a `label` property (class name or numeric id).
std::vector<evaluate::GroundTruthPoint> read_ground_truth(const std::string& path);
void write_ground_truth(const std::string& path,
                        const std::vector<evaluate::GroundTruthPoint>& points);

/// Detections as Polygon features (label, confidence, tile_id, window).
void write_detections(const std::string& path,
                      const std::vector<aggregate::WorldDetection>& detections);
std::vector<aggregate::WorldDetection> read_detections(const std::string& path);
void write_detections_csv(const std::string& path,
                          const std::vector<aggregate::WorldDetection>& detections);

/// Detection points as Point features.
void write_points(const std::string& path, const std::vector<aggregate::DetectionPoint>& points);
std::vector<aggregate::DetectionPoint> read_points(const std::string& path);
void write_points_csv(const std::string& path,
                      const std::vector<aggregate::DetectionPoint>& points);

/// Inventory points carry an extra road_system property
/// ("state"|"local"|"unclassified").
void write_inventory(const std::string& path,
                     const std::vector<inventory::InventoryRecord>& records);
std::vector<inventory::InventoryRecord> read_inventory(const std::string& path);
void write_inventory_csv(const std::string& path,
                         const std::vector<inventory::InventoryRecord>& records);

} // namespace lanemark::geojson
