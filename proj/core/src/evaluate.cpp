#include "lanemark/evaluate.hpp"

#include "lanemark/csv.hpp"
#include "lanemark/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

namespace lanemark::evaluate {

MatchCounts match_class(const std::vector<GroundTruthPoint>& gt,
                        const std::vector<aggregate::WorldDetection>& detections,
                        LaneLabel cls, double conf_floor) {
    std::vector<const GroundTruthPoint*> gt_cls;
    for (const auto& g : gt)
        if (g.label == cls) gt_cls.push_back(&g);

    std::vector<const aggregate::WorldDetection*> det_cls;
    for (const auto& d : detections)
        if (d.label == cls && d.confidence >= conf_floor) det_cls.push_back(&d);
    std::sort(det_cls.begin(), det_cls.end(),
              [](const aggregate::WorldDetection* a, const aggregate::WorldDetection* b) {
                  if (a->confidence != b->confidence) return a->confidence > b->confidence;
                  return std::make_tuple(a->bbox.min_x, a->bbox.min_y, a->bbox.max_x,
                                         a->bbox.max_y) <
                         std::make_tuple(b->bbox.min_x, b->bbox.min_y, b->bbox.max_x,
                                         b->bbox.max_y);
              });

    std::vector<bool> claimed(gt_cls.size(), false);
    long tp = 0;
    for (const auto* d : det_cls) {
        const auto center = d->bbox.center();
        long best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < gt_cls.size(); ++i) {
            if (claimed[i] || !geo::point_in_box(gt_cls[i]->location, d->bbox)) continue;
            const double dx = gt_cls[i]->location.x - center.x;
            const double dy = gt_cls[i]->location.y - center.y;
            const double dist = dx * dx + dy * dy;
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<long>(i);
            }
        }
        if (best >= 0) {
            claimed[static_cast<std::size_t>(best)] = true;
            ++tp;
        }
    }

    MatchCounts counts;
    counts.gt_total = static_cast<long>(gt_cls.size());
    counts.model_total = static_cast<long>(det_cls.size());
    counts.tp = tp;
    counts.fp = counts.model_total - tp;
    counts.fn = counts.gt_total - tp;
    return counts;
}

MetricsRow metrics(const MatchCounts& c, double confidence_floor) {
    if (c.gt_total < 0 || c.model_total < 0 || c.tp < 0 || c.fp < 0 || c.fn < 0)
        throw input_error("metrics: negative counts");
    MetricsRow row;
    row.confidence_floor = confidence_floor;
    row.counts = c;
    const auto gt = static_cast<double>(c.gt_total);
    const auto m = static_cast<double>(c.model_total);
    const auto fn = static_cast<double>(c.fn);
    const auto fp = static_cast<double>(c.fp);
    if (c.gt_total > 0) row.completeness = (gt - fn) / gt * 100.0;
    if (c.model_total > 0) row.correctness = (m - fp) / m * 100.0;
    if (c.gt_total + c.fp > 0) row.quality = (gt - fn) / (gt + fp) * 100.0;
    if (row.completeness && row.correctness && *row.completeness + *row.correctness > 0.0)
        row.f1 = 2.0 * *row.completeness * *row.correctness /
                 (*row.completeness + *row.correctness);
    return row;
}

std::vector<MetricsRow> sweep(const std::vector<GroundTruthPoint>& gt,
                              const std::vector<aggregate::WorldDetection>& detections,
                              LaneLabel cls, const std::vector<double>& floors) {
    for (std::size_t i = 1; i < floors.size(); ++i)
        if (floors[i] >= floors[i - 1]) throw input_error("sweep floors must be descending");
    std::vector<MetricsRow> rows;
    rows.reserve(floors.size());
    for (const double floor : floors)
        rows.push_back(metrics(match_class(gt, detections, cls, floor), floor));
    return rows;
}

namespace {

std::string pct(const std::optional<double>& v) {
    return v ? csv::format(*v, 2) : "NA";
}

} // namespace

std::string emit_circus_csv(const std::vector<ClassSweep>& sweeps) {
    std::ostringstream out;
    out << "model,class,confidence_floor,tp,fp,fn,completeness,correctness,quality,f1\n";
    for (const auto& s : sweeps) {
        for (const auto& r : s.rows) {
            out << csv::escape(s.model) << ',' << label_name(s.cls) << ','
                << csv::format(r.confidence_floor, 2) << ',' << r.counts.tp << ',' << r.counts.fp
                << ',' << r.counts.fn << ',' << pct(r.completeness) << ',' << pct(r.correctness)
                << ',' << pct(r.quality) << ',' << pct(r.f1) << '\n';
        }
    }
    return out.str();
}

namespace {

// Max perpendicular distance of cluster members from the least-squares line
// through them; 0 for clusters of fewer than three points.
double max_axis_residual(const std::vector<aggregate::DetectionPoint>& points,
                         const std::vector<std::size_t>& members) {
    if (members.size() < 3) return 0.0;
    double mx = 0.0, my = 0.0;
    for (const auto i : members) {
        mx += points[i].location.x;
        my += points[i].location.y;
    }
    mx /= static_cast<double>(members.size());
    my /= static_cast<double>(members.size());
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto i : members) {
        const double dx = points[i].location.x - mx;
        const double dy = points[i].location.y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // Principal axis of the 2x2 scatter matrix.
    const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    const double nx = -std::sin(angle);
    const double ny = std::cos(angle);
    double worst = 0.0;
    for (const auto i : members) {
        const double d = std::abs(nx * (points[i].location.x - mx) +
                                  ny * (points[i].location.y - my));
        worst = std::max(worst, d);
    }
    return worst;
}

} // namespace

std::vector<LaneGroup> group_lanes(const std::vector<aggregate::DetectionPoint>& points,
                                   double gap, double lateral_tol) {
    if (gap <= 0.0 || lateral_tol < 0.0) throw input_error("group_lanes: bad parameters");

    // Single-linkage chaining per class within the gap distance.
    std::vector<int> cluster_of(points.size(), -1);
    std::vector<LaneGroup> clusters;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (cluster_of[i] >= 0) continue;
        LaneGroup g;
        g.label = points[i].label;
        std::vector<std::size_t> frontier{i};
        cluster_of[i] = static_cast<int>(clusters.size());
        g.members.push_back(i);
        while (!frontier.empty()) {
            const std::size_t cur = frontier.back();
            frontier.pop_back();
            for (std::size_t j = 0; j < points.size(); ++j) {
                if (cluster_of[j] >= 0 || points[j].label != g.label) continue;
                const double d = std::hypot(points[j].location.x - points[cur].location.x,
                                            points[j].location.y - points[cur].location.y);
                if (d > gap) continue;
                cluster_of[j] = static_cast<int>(clusters.size());
                g.members.push_back(j);
                frontier.push_back(j);
            }
        }
        clusters.push_back(std::move(g));
    }

    // Split chains that bend beyond the lateral tolerance: farthest-off
    // member starts its own lane, repeat until every cluster is straight.
    std::vector<LaneGroup> out;
    std::vector<LaneGroup> todo = std::move(clusters);
    while (!todo.empty()) {
        LaneGroup g = std::move(todo.back());
        todo.pop_back();
        if (max_axis_residual(points, g.members) <= lateral_tol) {
            std::sort(g.members.begin(), g.members.end());
            out.push_back(std::move(g));
            continue;
        }
        double worst = -1.0;
        std::size_t worst_at = 0;
        double mx = 0.0, my = 0.0;
        for (const auto i : g.members) {
            mx += points[i].location.x;
            my += points[i].location.y;
        }
        mx /= static_cast<double>(g.members.size());
        my /= static_cast<double>(g.members.size());
        for (std::size_t k = 0; k < g.members.size(); ++k) {
            const auto& p = points[g.members[k]].location;
            const double d = std::hypot(p.x - mx, p.y - my);
            if (d > worst) {
                worst = d;
                worst_at = k;
            }
        }
        LaneGroup split;
        split.label = g.label;
        split.members.push_back(g.members[worst_at]);
        g.members.erase(g.members.begin() + static_cast<std::ptrdiff_t>(worst_at));
        todo.push_back(std::move(g));
        todo.push_back(std::move(split));
    }
    std::sort(out.begin(), out.end(), [](const LaneGroup& a, const LaneGroup& b) {
        return a.members.front() < b.members.front();
    });
    return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<ClassSweep>& sweeps) {
    out << "Class,Confidence,M,TP,FP,FN,Completeness,Correctness,Quality,F1\n";
    for (const auto& s : sweeps) {
        for (const auto& r : s.rows) {
            out << label_name(s.cls) << ',' << csv::format(r.confidence_floor * 100.0, 0) << ','
                << r.counts.model_total << ',' << r.counts.tp << ',' << r.counts.fp << ','
                << r.counts.fn << ',' << pct(r.completeness) << ',' << pct(r.correctness) << ','
                << pct(r.quality) << ',' << pct(r.f1) << '\n';
        }
    }
}

} // namespace lanemark::evaluate
