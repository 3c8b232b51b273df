#include "lanemark/geo.hpp"

#include "lanemark/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace lanemark::geo {

const char* road_system_name(RoadSystem rs) {
    return rs == RoadSystem::State ? "state" : "local";
}

RoadSystem road_system_from_string(const std::string& s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "state" || lower == "on") return RoadSystem::State;
    if (lower == "local" || lower == "off") return RoadSystem::Local;
    throw input_error("unknown road_system '" + s + "' (expected state|local)");
}

bool GeoTransform::valid() const {
    return std::isfinite(origin_x) && std::isfinite(origin_y) &&
           std::isfinite(px_size) && px_size > 0.0;
}

WorldPoint pixel_to_world(double col, double row, const GeoTransform& t) {
    return {t.origin_x + col * t.px_size, t.origin_y - row * t.px_size};
}

PixelCoord world_to_pixel(const WorldPoint& p, const GeoTransform& t) {
    return {(p.x - t.origin_x) / t.px_size, (t.origin_y - p.y) / t.px_size};
}

double distance_point_to_segment(const WorldPoint& p, const WorldPoint& a, const WorldPoint& b) {
    const double abx = b.x - a.x;
    const double aby = b.y - a.y;
    const double len2 = abx * abx + aby * aby;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
        t = std::clamp(t, 0.0, 1.0);
    }
    const double dx = p.x - (a.x + t * abx);
    const double dy = p.y - (a.y + t * aby);
    return std::hypot(dx, dy);
}

double distance_point_to_polyline(const WorldPoint& p, const RoadCenterline& line) {
    if (line.vertices.size() < 2) throw input_error("centerline '" + line.id + "' has fewer than 2 vertices");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.vertices.size(); ++i) {
        best = std::min(best, distance_point_to_segment(p, line.vertices[i], line.vertices[i + 1]));
    }
    return best;
}

namespace {

double intersection_area(const WorldBox& a, const WorldBox& b) {
    const double w = std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x);
    const double h = std::min(a.max_y, b.max_y) - std::max(a.min_y, b.min_y);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

} // namespace

double overlap_ratio(const WorldBox& a, const WorldBox& b) {
    if (!a.valid() || !b.valid()) throw input_error("overlap_ratio: invalid box");
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return a == b ? 1.0 : 0.0; // degenerate boxes
    return inter / uni;
}

double overlap_over_smaller(const WorldBox& a, const WorldBox& b) {
    if (!a.valid() || !b.valid()) throw input_error("overlap_over_smaller: invalid box");
    const double inter = intersection_area(a, b);
    const double smaller = std::min(a.area(), b.area());
    if (smaller <= 0.0) return a == b ? 1.0 : 0.0;
    return inter / smaller;
}

bool point_in_box(const WorldPoint& p, const WorldBox& b) {
    if (!b.valid()) throw input_error("point_in_box: invalid box");
    return p.x >= b.min_x && p.x <= b.max_x && p.y >= b.min_y && p.y <= b.max_y;
}

namespace {

bool segments_intersect(const WorldPoint& p1, const WorldPoint& p2,
                        const WorldPoint& q1, const WorldPoint& q2) {
    auto orient = [](const WorldPoint& a, const WorldPoint& b, const WorldPoint& c) {
        const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (v > 0.0) return 1;
        if (v < 0.0) return -1;
        return 0;
    };
    auto on_seg = [](const WorldPoint& a, const WorldPoint& b, const WorldPoint& c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
    };
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_seg(p1, p2, q1)) return true;
    if (o2 == 0 && on_seg(p1, p2, q2)) return true;
    if (o3 == 0 && on_seg(q1, q2, p1)) return true;
    if (o4 == 0 && on_seg(q1, q2, p2)) return true;
    return false;
}

double segment_segment_distance(const WorldPoint& p1, const WorldPoint& p2,
                                const WorldPoint& q1, const WorldPoint& q2) {
    if (segments_intersect(p1, p2, q1, q2)) return 0.0;
    return std::min({distance_point_to_segment(p1, q1, q2),
                     distance_point_to_segment(p2, q1, q2),
                     distance_point_to_segment(q1, p1, p2),
                     distance_point_to_segment(q2, p1, p2)});
}

} // namespace

double distance_segment_to_box(const WorldPoint& a, const WorldPoint& b, const WorldBox& box) {
    if (!box.valid()) throw input_error("distance_segment_to_box: invalid box");
    if (point_in_box(a, box) || point_in_box(b, box)) return 0.0;
    const WorldPoint c1{box.min_x, box.min_y};
    const WorldPoint c2{box.max_x, box.min_y};
    const WorldPoint c3{box.max_x, box.max_y};
    const WorldPoint c4{box.min_x, box.max_y};
    return std::min({segment_segment_distance(a, b, c1, c2),
                     segment_segment_distance(a, b, c2, c3),
                     segment_segment_distance(a, b, c3, c4),
                     segment_segment_distance(a, b, c4, c1)});
}

} // namespace lanemark::geo
