#pragma once

#include <string>
#include <vector>

namespace lanemark::geo {

/// Planar world coordinates in linear feet, north-up (y grows northward).
struct WorldPoint {
    double x{0.0};
    double y{0.0};
};

/// Axis-aligned box in world feet.
struct WorldBox {
    double min_x{0.0};
    double min_y{0.0};
    double max_x{0.0};
    double max_y{0.0};

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double area() const { return width() * height(); }
    WorldPoint center() const { return {(min_x + max_x) * 0.5, (min_y + max_y) * 0.5}; }
    bool valid() const { return min_x <= max_x && min_y <= max_y; }

    bool operator==(const WorldBox&) const = default;
};

enum class RoadSystem { State, Local };

const char* road_system_name(RoadSystem rs);
RoadSystem road_system_from_string(const std::string& s);

/// Road centerline polyline. Consecutive vertices are distinct and every
/// record carries its maintaining road system.
struct RoadCenterline {
    std::string id;
    std::vector<WorldPoint> vertices; // >= 2
    RoadSystem road_system{RoadSystem::Local};
};

/// Affine pixel<->world mapping for a north-up raster with square pixels.
/// (origin_x, origin_y) is the world position of the top-left pixel's
/// top-left corner; world y decreases as pixel row increases.
struct GeoTransform {
    double origin_x{0.0};
    double origin_y{0.0};
    double px_size{1.0}; // feet per pixel, > 0

    bool valid() const;
};

/// Fractional pixel coordinates (col grows right, row grows down).
struct PixelCoord {
    double col{0.0};
    double row{0.0};
};

WorldPoint pixel_to_world(double col, double row, const GeoTransform& t);
PixelCoord world_to_pixel(const WorldPoint& p, const GeoTransform& t);

double distance_point_to_segment(const WorldPoint& p, const WorldPoint& a, const WorldPoint& b);

/// Minimum Euclidean distance from p to any segment of the polyline.
double distance_point_to_polyline(const WorldPoint& p, const RoadCenterline& line);

/// Intersection over union. 0 for disjoint boxes, 1 only for identical
/// boxes. Identical degenerate (zero-area) boxes also score 1.
double overlap_ratio(const WorldBox& a, const WorldBox& b);

/// Intersection over the smaller box's area; alternative dedup metric.
double overlap_over_smaller(const WorldBox& a, const WorldBox& b);

/// Boundary points count as inside.
bool point_in_box(const WorldPoint& p, const WorldBox& b);

/// Distance from segment ab to an axis-aligned box; 0 when they touch,
/// intersect, or the segment lies inside the box.
double distance_segment_to_box(const WorldPoint& a, const WorldPoint& b, const WorldBox& box);

} // namespace lanemark::geo
