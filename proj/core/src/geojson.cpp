#include "lanemark/geojson.hpp"

#include "lanemark/csv.hpp"
#include "lanemark/errors.hpp"
#include "lanemark/inventory.hpp"

#include <json.hpp>

#include <fstream>

namespace lanemark::geojson {

using nlohmann::json;

namespace {

json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw input_error("malformed JSON in '" + path + "': " + e.what());
    }
    if (j.value("type", "") != "FeatureCollection" || !j.contains("features"))
        throw input_error("'" + path + "' is not a GeoJSON FeatureCollection");
    return j;
}

void save(const std::string& path, json features) {
    json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    std::ofstream out(path);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
}

geo::WorldPoint point_coords(const json& geometry, const std::string& path) {
    if (geometry.value("type", "") != "Point")
        throw input_error("'" + path + "': expected Point geometry");
    const auto& c = geometry.at("coordinates");
    return {c.at(0).get<double>(), c.at(1).get<double>()};
}

std::vector<geo::WorldPoint> linestring_coords(const json& coords) {
    std::vector<geo::WorldPoint> pts;
    for (const auto& c : coords) pts.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    // Drop consecutive duplicates so the distinct-vertex invariant holds.
    std::vector<geo::WorldPoint> out;
    for (const auto& p : pts) {
        if (out.empty() || out.back().x != p.x || out.back().y != p.y) out.push_back(p);
    }
    return out;
}

std::string property_id(const json& props) {
    if (!props.contains("id")) return "";
    const auto& v = props["id"];
    return v.is_string() ? v.get<std::string>() : v.dump();
}

json box_polygon(const geo::WorldBox& b) {
    return json::array({json::array({
        json::array({b.min_x, b.min_y}),
        json::array({b.max_x, b.min_y}),
        json::array({b.max_x, b.max_y}),
        json::array({b.min_x, b.max_y}),
        json::array({b.min_x, b.min_y}),
    })});
}

json source_props(const aggregate::DetectionSource& s) {
    return json{{"tile_id", s.tile_id}, {"window_col", s.window_col}, {"window_row", s.window_row}};
}

aggregate::DetectionSource source_from(const json& props) {
    aggregate::DetectionSource s;
    s.tile_id = props.value("tile_id", "");
    s.window_col = props.value("window_col", 0);
    s.window_row = props.value("window_row", 0);
    return s;
}

} // namespace

std::vector<geo::RoadCenterline> read_centerlines(const std::string& path) {
    const json doc = load(path);
    std::vector<geo::RoadCenterline> lines;
    for (const auto& feature : doc["features"]) {
        const auto& props = feature.at("properties");
        if (!props.contains("road_system"))
            throw input_error("'" + path + "': centerline feature lacks road_system property");
        const auto rs = geo::road_system_from_string(props["road_system"].get<std::string>());
        const std::string id = property_id(props);
        const auto& geometry = feature.at("geometry");
        const std::string type = geometry.value("type", "");

        auto add = [&](const json& coords, const std::string& line_id) {
            auto verts = linestring_coords(coords);
            if (verts.size() < 2)
                throw input_error("'" + path + "': centerline '" + line_id +
                                  "' has fewer than 2 distinct vertices");
            lines.push_back({line_id, std::move(verts), rs});
        };
        if (type == "LineString") {
            add(geometry.at("coordinates"), id);
        } else if (type == "MultiLineString") {
            const auto& parts = geometry.at("coordinates");
            for (std::size_t i = 0; i < parts.size(); ++i)
                add(parts[i], id + "/" + std::to_string(i));
        } else {
            throw input_error("'" + path + "': unsupported centerline geometry '" + type + "'");
        }
    }
    return lines;
}

void write_centerlines(const std::string& path, const std::vector<geo::RoadCenterline>& lines) {
    json features = json::array();
    for (const auto& line : lines) {
        json coords = json::array();
        for (const auto& v : line.vertices) coords.push_back(json::array({v.x, v.y}));
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                            {"properties",
                             {{"id", line.id},
                              {"road_system", geo::road_system_name(line.road_system)}}}});
    }
    save(path, std::move(features));
}

std::vector<evaluate::GroundTruthPoint> read_ground_truth(const std::string& path) {
    const json doc = load(path);
    std::vector<evaluate::GroundTruthPoint> points;
    for (const auto& feature : doc["features"]) {
        const auto& props = feature.at("properties");
        if (!props.contains("label"))
            throw input_error("'" + path + "': ground-truth feature lacks label property");
        evaluate::GroundTruthPoint p;
        const auto& label = props["label"];
        p.label = label.is_string() ? label_from_string(label.get<std::string>())
                                    : static_cast<LaneLabel>(label.get<int>());
        if (p.label == LaneLabel::none)
            throw input_error("'" + path + "': ground-truth labels must be positive classes");
        p.location = point_coords(feature.at("geometry"), path);
        points.push_back(p);
    }
    return points;
}

void write_ground_truth(const std::string& path,
                        const std::vector<evaluate::GroundTruthPoint>& points) {
    json features = json::array();
    for (const auto& p : points) {
        features.push_back(
            {{"type", "Feature"},
             {"geometry", {{"type", "Point"}, {"coordinates", json::array({p.location.x, p.location.y})}}},
             {"properties", {{"label", label_name(p.label)}}}});
    }
    save(path, std::move(features));
}

void write_detections(const std::string& path,
                      const std::vector<aggregate::WorldDetection>& detections) {
    json features = json::array();
    for (const auto& d : detections) {
        json props = source_props(d.source);
        props["label"] = label_name(d.label);
        props["confidence"] = d.confidence;
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", box_polygon(d.bbox)}}},
                            {"properties", std::move(props)}});
    }
    save(path, std::move(features));
}

std::vector<aggregate::WorldDetection> read_detections(const std::string& path) {
    const json doc = load(path);
    std::vector<aggregate::WorldDetection> out;
    for (const auto& feature : doc["features"]) {
        const auto& geometry = feature.at("geometry");
        if (geometry.value("type", "") != "Polygon")
            throw input_error("'" + path + "': expected Polygon geometry");
        const auto& ring = geometry.at("coordinates").at(0);
        if (ring.size() < 4) throw input_error("'" + path + "': degenerate polygon ring");
        geo::WorldBox box{ring[0][0].get<double>(), ring[0][1].get<double>(),
                          ring[0][0].get<double>(), ring[0][1].get<double>()};
        for (const auto& c : ring) {
            box.min_x = std::min(box.min_x, c.at(0).get<double>());
            box.max_x = std::max(box.max_x, c.at(0).get<double>());
            box.min_y = std::min(box.min_y, c.at(1).get<double>());
            box.max_y = std::max(box.max_y, c.at(1).get<double>());
        }
        const auto& props = feature.at("properties");
        aggregate::WorldDetection d;
        d.label = label_from_string(props.at("label").get<std::string>());
        d.confidence = props.at("confidence").get<double>();
        d.bbox = box;
        d.source = source_from(props);
        out.push_back(std::move(d));
    }
    return out;
}

void write_detections_csv(const std::string& path,
                          const std::vector<aggregate::WorldDetection>& detections) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    out << "label,confidence,min_x,min_y,max_x,max_y,tile_id,window_col,window_row\n";
    for (const auto& d : detections) {
        out << label_name(d.label) << ',' << csv::format(d.confidence, 6) << ','
            << csv::format(d.bbox.min_x, 3) << ',' << csv::format(d.bbox.min_y, 3) << ','
            << csv::format(d.bbox.max_x, 3) << ',' << csv::format(d.bbox.max_y, 3) << ','
            << csv::escape(d.source.tile_id) << ',' << d.source.window_col << ','
            << d.source.window_row << '\n';
    }
}

void write_points(const std::string& path, const std::vector<aggregate::DetectionPoint>& points) {
    json features = json::array();
    for (const auto& p : points) {
        json props = source_props(p.source);
        props["label"] = label_name(p.label);
        props["confidence"] = p.confidence;
        features.push_back(
            {{"type", "Feature"},
             {"geometry", {{"type", "Point"}, {"coordinates", json::array({p.location.x, p.location.y})}}},
             {"properties", std::move(props)}});
    }
    save(path, std::move(features));
}

std::vector<aggregate::DetectionPoint> read_points(const std::string& path) {
    const json doc = load(path);
    std::vector<aggregate::DetectionPoint> out;
    for (const auto& feature : doc["features"]) {
        const auto& props = feature.at("properties");
        aggregate::DetectionPoint p;
        p.label = label_from_string(props.at("label").get<std::string>());
        p.confidence = props.at("confidence").get<double>();
        p.location = point_coords(feature.at("geometry"), path);
        p.source = source_from(props);
        out.push_back(std::move(p));
    }
    return out;
}

void write_points_csv(const std::string& path,
                      const std::vector<aggregate::DetectionPoint>& points) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    out << "label,confidence,x,y,tile_id,window_col,window_row\n";
    for (const auto& p : points) {
        out << label_name(p.label) << ',' << csv::format(p.confidence, 6) << ','
            << csv::format(p.location.x, 3) << ',' << csv::format(p.location.y, 3) << ','
            << csv::escape(p.source.tile_id) << ',' << p.source.window_col << ','
            << p.source.window_row << '\n';
    }
}

void write_inventory(const std::string& path,
                     const std::vector<inventory::InventoryRecord>& records) {
    json features = json::array();
    for (const auto& r : records) {
        json props = source_props(r.point.source);
        props["label"] = label_name(r.point.label);
        props["confidence"] = r.point.confidence;
        props["road_system"] =
            r.road_system ? geo::road_system_name(*r.road_system) : "unclassified";
        features.push_back({{"type", "Feature"},
                            {"geometry",
                             {{"type", "Point"},
                              {"coordinates", json::array({r.point.location.x, r.point.location.y})}}},
                            {"properties", std::move(props)}});
    }
    save(path, std::move(features));
}

std::vector<inventory::InventoryRecord> read_inventory(const std::string& path) {
    const json doc = load(path);
    std::vector<inventory::InventoryRecord> out;
    for (const auto& feature : doc["features"]) {
        const auto& props = feature.at("properties");
        inventory::InventoryRecord r;
        r.point.label = label_from_string(props.at("label").get<std::string>());
        r.point.confidence = props.at("confidence").get<double>();
        r.point.location = point_coords(feature.at("geometry"), path);
        r.point.source = source_from(props);
        const std::string rs = props.value("road_system", "unclassified");
        if (rs != "unclassified") r.road_system = geo::road_system_from_string(rs);
        out.push_back(std::move(r));
    }
    return out;
}

void write_inventory_csv(const std::string& path,
                         const std::vector<inventory::InventoryRecord>& records) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    out << "label,confidence,road_system,x,y,tile_id\n";
    for (const auto& r : records) {
        out << label_name(r.point.label) << ',' << csv::format(r.point.confidence, 6) << ','
            << (r.road_system ? geo::road_system_name(*r.road_system) : "unclassified") << ','
            << csv::format(r.point.location.x, 3) << ',' << csv::format(r.point.location.y, 3)
            << ',' << csv::escape(r.point.source.tile_id) << '\n';
    }
}

} // namespace lanemark::geojson
