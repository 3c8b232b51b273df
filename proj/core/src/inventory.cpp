#include "lanemark/inventory.hpp"

#include "lanemark/csv.hpp"
#include "lanemark/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <ostream>

namespace lanemark::inventory {

std::optional<geo::RoadSystem> assign_road_system(const aggregate::DetectionPoint& p,
                                                  const std::vector<geo::RoadCenterline>& lines,
                                                  double buffer_radius) {
    double best = std::numeric_limits<double>::infinity();
    bool state_at_best = false;
    bool found = false;
    for (const auto& line : lines) {
        const double d = geo::distance_point_to_polyline(p.location, line);
        if (d > buffer_radius) continue;
        if (!found || d < best) {
            best = d;
            state_at_best = line.road_system == geo::RoadSystem::State;
            found = true;
        } else if (d == best && line.road_system == geo::RoadSystem::State) {
            state_at_best = true; // exact tie goes to State
        }
    }
    if (!found) return std::nullopt;
    return state_at_best ? geo::RoadSystem::State : geo::RoadSystem::Local;
}

std::optional<geo::RoadSystem> assign_road_system(const aggregate::DetectionPoint& p,
                                                  const preprocess::SegmentGrid& grid,
                                                  const std::vector<geo::RoadCenterline>& lines) {
    // The grid returns the lowest-index nearest line; State ties need the
    // full tie set, so re-scan lines at the winning distance.
    double dist = 0.0;
    const int idx = grid.nearest_line(p.location, &dist);
    if (idx < 0) return std::nullopt;
    if (lines[static_cast<std::size_t>(idx)].road_system == geo::RoadSystem::State)
        return geo::RoadSystem::State;
    for (const auto& line : lines) {
        if (line.road_system != geo::RoadSystem::State) continue;
        if (geo::distance_point_to_polyline(p.location, line) == dist)
            return geo::RoadSystem::State;
    }
    return geo::RoadSystem::Local;
}

std::vector<CountRow> count_table(const std::vector<InventoryRecord>& records,
                                  const std::vector<double>& floors) {
    static constexpr LaneLabel kOrder[] = {LaneLabel::left_only, LaneLabel::right_only,
                                           LaneLabel::center};
    std::vector<CountRow> rows;
    for (const LaneLabel cls : kOrder) {
        for (const double floor : floors) {
            CountRow row;
            row.cls = cls;
            row.confidence_floor = floor;
            for (const auto& r : records) {
                if (r.point.label != cls || r.point.confidence < floor || !r.road_system)
                    continue;
                if (*r.road_system == geo::RoadSystem::State)
                    ++row.state;
                else
                    ++row.local;
            }
            row.total = row.state + row.local;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_count_csv(std::ostream& out, const std::vector<CountRow>& rows) {
    out << "class,confidence_floor,state_roads,local_roads,total\n";
    for (const auto& r : rows) {
        out << label_name(r.cls) << ',' << csv::format(r.confidence_floor, 2) << ',' << r.state
            << ',' << r.local << ',' << r.total << '\n';
    }
}

std::vector<InventoryRecord> read_attribute_csv(std::istream& in) {
    const auto records = csv::read(in);
    if (records.empty()) throw input_error("attribute file is empty");
    std::vector<InventoryRecord> out;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i];
        if (f.size() < 3) throw input_error("attribute file: expected label,confidence,road_system");
        InventoryRecord rec;
        rec.point.label = label_from_string(f[0]);
        rec.point.confidence = std::stod(f[1]);
        if (f[2] == "unclassified")
            rec.road_system = std::nullopt;
        else
            rec.road_system = geo::road_system_from_string(f[2]);
        out.push_back(std::move(rec));
    }
    return out;
}

void PipelineConfig::validate() const {
    if (buffer_radius <= 0.0) throw input_error("config: buffer_radius must be positive");
    if (chip_size <= 0 || stride <= 0 || pad < 0)
        throw input_error("config: chip_size/stride must be positive, pad non-negative");
    if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0))
        throw input_error("config: confidence_floor must lie in [0, 1]");
    if (!(overlap_floor > 0.0 && overlap_floor <= 1.0))
        throw input_error("config: overlap_floor must lie in (0, 1]");
    if (!(score_floor > -1.0 && score_floor < 1.0))
        throw input_error("config: score_floor must lie in (-1, 1)");
    if (threads == 0) throw input_error("config: threads must be >= 1");
    if (lane_gap <= 0.0) throw input_error("config: lane_gap must be positive");
    if (sweep_floors.empty()) throw input_error("config: sweep_floors must not be empty");
    for (std::size_t i = 1; i < sweep_floors.size(); ++i)
        if (sweep_floors[i] >= sweep_floors[i - 1])
            throw input_error("config: sweep_floors must be strictly descending");
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("malformed config '" + path + "': " + e.what());
    }

    PipelineConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].template get<std::decay_t<decltype(field)>>();
    };
    get("buffer_radius", cfg.buffer_radius);
    get("chip_size", cfg.chip_size);
    get("stride", cfg.stride);
    get("pad", cfg.pad);
    get("confidence_floor", cfg.confidence_floor);
    get("overlap_floor", cfg.overlap_floor);
    get("sweep_floors", cfg.sweep_floors);
    get("detector", cfg.detector_engine);
    get("score_floor", cfg.score_floor);
    get("threads", cfg.threads);
    get("dump_chips", cfg.dump_chips);
    get("group_lanes", cfg.group_lanes);
    get("lane_gap", cfg.lane_gap);
    get("tiles_dir", cfg.tiles_dir);
    get("centerlines", cfg.centerlines_path);
    get("ground_truth", cfg.ground_truth_path);
    get("templates_dir", cfg.templates_dir);
    get("out_dir", cfg.out_dir);
    if (j.contains("schema")) cfg.schema = schema_from_class_count(j["schema"].get<int>());
    if (j.contains("overlap_metric"))
        cfg.overlap_metric = aggregate::overlap_metric_from_string(j["overlap_metric"].get<std::string>());
    cfg.validate();
    return cfg;
}

} // namespace lanemark::inventory
