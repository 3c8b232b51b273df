#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lanemark/evaluate.hpp"
#include "lanemark/errors.hpp"

#include "support/golden.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace lanemark;
using namespace lanemark::evaluate;

namespace {

aggregate::WorldDetection det(LaneLabel label, geo::WorldBox box, double conf) {
    return {label, box, conf, {"t", 0, 0}};
}

// Independent matcher applying the same greedy rule with its own plumbing.
MatchCounts match_oracle(std::vector<GroundTruthPoint> gt,
                         std::vector<aggregate::WorldDetection> ds, LaneLabel cls,
                         double floor) {
    std::erase_if(gt, [&](const GroundTruthPoint& g) { return g.label != cls; });
    std::erase_if(ds, [&](const aggregate::WorldDetection& d) {
        return d.label != cls || d.confidence < floor;
    });
    std::stable_sort(ds.begin(), ds.end(),
                     [](const aggregate::WorldDetection& a, const aggregate::WorldDetection& b) {
                         if (a.confidence != b.confidence) return a.confidence > b.confidence;
                         if (a.bbox.min_x != b.bbox.min_x) return a.bbox.min_x < b.bbox.min_x;
                         if (a.bbox.min_y != b.bbox.min_y) return a.bbox.min_y < b.bbox.min_y;
                         if (a.bbox.max_x != b.bbox.max_x) return a.bbox.max_x < b.bbox.max_x;
                         return a.bbox.max_y < b.bbox.max_y;
                     });
    std::vector<bool> used(gt.size(), false);
    long tp = 0;
    for (const auto& d : ds) {
        long pick = -1;
        double best = 1e300;
        for (std::size_t i = 0; i < gt.size(); ++i) {
            if (used[i]) continue;
            const auto& p = gt[i].location;
            if (p.x < d.bbox.min_x || p.x > d.bbox.max_x || p.y < d.bbox.min_y ||
                p.y > d.bbox.max_y)
                continue;
            const auto c = d.bbox.center();
            const double dist = (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
            if (dist < best) {
                best = dist;
                pick = static_cast<long>(i);
            }
        }
        if (pick >= 0) {
            used[static_cast<std::size_t>(pick)] = true;
            ++tp;
        }
    }
    return {static_cast<long>(gt.size()), static_cast<long>(ds.size()), tp,
            static_cast<long>(ds.size()) - tp, static_cast<long>(gt.size()) - tp};
}

struct RandomScene {
    std::vector<GroundTruthPoint> gt;
    std::vector<aggregate::WorldDetection> ds;
};

RandomScene random_scene(std::mt19937& rng, int n_gt, int n_det) {
    std::uniform_real_distribution<double> pos(0.0, 100.0);
    std::uniform_real_distribution<double> size(1.0, 25.0);
    std::uniform_real_distribution<double> conf(0.05, 1.0);
    static const LaneLabel kLabels[] = {LaneLabel::left_only, LaneLabel::right_only,
                                        LaneLabel::center};
    std::uniform_int_distribution<int> label(0, 2);
    RandomScene s;
    for (int i = 0; i < n_gt; ++i) s.gt.push_back({{pos(rng), pos(rng)}, kLabels[label(rng)]});
    for (int i = 0; i < n_det; ++i) {
        const double x = pos(rng), y = pos(rng);
        s.ds.push_back(det(kLabels[label(rng)], {x, y, x + size(rng), y + size(rng)}, conf(rng)));
    }
    return s;
}

} // namespace

TEST_CASE("metrics reproduces every golden cell within 0.01 points") {
    for (const auto& row : fixtures::golden_metric_rows()) {
        const MatchCounts counts{row.gt, row.m, row.tp, row.fp, row.fn};
        const auto r = metrics(counts, row.confidence / 100.0);
        REQUIRE(r.completeness.has_value());
        REQUIRE(r.correctness.has_value());
        REQUIRE(r.quality.has_value());
        REQUIRE(r.f1.has_value());
        CHECK(std::abs(*r.completeness - row.completeness) <= 0.01);
        CHECK(std::abs(*r.correctness - row.correctness) <= 0.01);
        CHECK(std::abs(*r.quality - row.quality) <= 0.01);
        CHECK(std::abs(*r.f1 - row.f1) <= 0.01);
    }
}

TEST_CASE("every golden row satisfies TP = GT - FN and TP = M - FP") {
    for (const auto& row : fixtures::golden_metric_rows()) {
        CHECK(row.tp == row.gt - row.fn);
        CHECK(row.tp == row.m - row.fp);
    }
}

TEST_CASE("match_class fixed scenarios") {
    const LaneLabel cls = LaneLabel::left_only;

    SUBCASE("point inside same-class polygon is a TP") {
        const auto c = match_class({{{5, 5}, cls}}, {det(cls, {0, 0, 10, 10}, 0.9)}, cls, 0.05);
        CHECK(c.tp == 1);
        CHECK(c.fp == 0);
        CHECK(c.fn == 0);
    }
    SUBCASE("polygon without a point is an FP; point without a polygon is an FN") {
        const auto fp = match_class({}, {det(cls, {0, 0, 10, 10}, 0.9)}, cls, 0.05);
        CHECK(fp.tp == 0);
        CHECK(fp.fp == 1);
        CHECK(fp.fn == 0);
        const auto fn = match_class({{{5, 5}, cls}}, {}, cls, 0.05);
        CHECK(fn.fn == 1);
        CHECK(fn.gt_total == 1);
        CHECK(fn.model_total == 0);
    }
    SUBCASE("matching is class-exclusive") {
        // A left GT point inside a right polygon: FN for left, FP for right.
        const std::vector<GroundTruthPoint> gt = {{{5, 5}, LaneLabel::left_only}};
        const std::vector<aggregate::WorldDetection> ds = {
            det(LaneLabel::right_only, {0, 0, 10, 10}, 0.9)};
        const auto left = match_class(gt, ds, LaneLabel::left_only, 0.05);
        CHECK(left.fn == 1);
        CHECK(left.model_total == 0);
        const auto right = match_class(gt, ds, LaneLabel::right_only, 0.05);
        CHECK(right.fp == 1);
        CHECK(right.gt_total == 0);
    }
    SUBCASE("one-to-one: a polygon claims a single point, nearest to center") {
        const std::vector<GroundTruthPoint> gt = {{{5.0, 5.2}, cls}, {{6.5, 5.0}, cls}};
        const auto c = match_class(gt, {det(cls, {0, 0, 10, 10}, 0.9)}, cls, 0.05);
        CHECK(c.tp == 1);
        CHECK(c.fn == 1);
        CHECK(c.fp == 0);
    }
    SUBCASE("confidence floor filters detections") {
        const auto c = match_class({{{5, 5}, cls}}, {det(cls, {0, 0, 10, 10}, 0.3)}, cls, 0.5);
        CHECK(c.model_total == 0);
        CHECK(c.fn == 1);
    }
}

TEST_CASE("match_class equals the exhaustive oracle on random scenes") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto scene = random_scene(rng, 50, 50);
        for (const LaneLabel cls :
             {LaneLabel::left_only, LaneLabel::right_only, LaneLabel::center}) {
            const auto mine = match_class(scene.gt, scene.ds, cls, 0.25);
            const auto oracle = match_oracle(scene.gt, scene.ds, cls, 0.25);
            CHECK(mine.tp == oracle.tp);
            CHECK(mine.fp == oracle.fp);
            CHECK(mine.fn == oracle.fn);
            CHECK(mine.gt_total == oracle.gt_total);
            CHECK(mine.model_total == oracle.model_total);
            // Identities hold by construction.
            CHECK(mine.tp + mine.fp == mine.model_total);
            CHECK(mine.tp + mine.fn == mine.gt_total);
        }
    }
}

TEST_CASE("metrics handles edge cases with in-band N/A") {
    SUBCASE("perfect detector") {
        const auto r = metrics({50, 50, 50, 0, 0});
        CHECK(*r.completeness == doctest::Approx(100.0));
        CHECK(*r.correctness == doctest::Approx(100.0));
        CHECK(*r.quality == doctest::Approx(100.0));
        CHECK(*r.f1 == doctest::Approx(100.0));
    }
    SUBCASE("nothing detected: correctness undefined") {
        const auto r = metrics({10, 0, 0, 0, 10});
        CHECK(*r.completeness == doctest::Approx(0.0));
        CHECK(!r.correctness.has_value());
        CHECK(!r.f1.has_value());
        CHECK(*r.quality == doctest::Approx(0.0));
    }
    SUBCASE("no ground truth: completeness undefined") {
        const auto r = metrics({0, 5, 0, 5, 0});
        CHECK(!r.completeness.has_value());
        CHECK(*r.correctness == doctest::Approx(0.0));
        CHECK(!r.f1.has_value());
    }
    SUBCASE("empty everything") {
        const auto r = metrics({0, 0, 0, 0, 0});
        CHECK(!r.completeness.has_value());
        CHECK(!r.correctness.has_value());
        CHECK(!r.quality.has_value());
        CHECK(!r.f1.has_value());
    }
    SUBCASE("negative counts are rejected") {
        CHECK_THROWS_AS(metrics({-1, 0, 0, 0, 0}), input_error);
    }
}

TEST_CASE("quality never exceeds completeness or correctness; f1 is the harmonic mean") {
    std::mt19937 rng(43);
    std::uniform_int_distribution<long> n(0, 500);
    for (int i = 0; i < 500; ++i) {
        const long gt = n(rng), m = n(rng);
        const long tp = std::min({n(rng), gt, m});
        const auto r = metrics({gt, m, tp, m - tp, gt - tp});
        if (r.quality && r.completeness) CHECK(*r.quality <= *r.completeness + 1e-12);
        if (r.quality && r.correctness) CHECK(*r.quality <= *r.correctness + 1e-12);
        if (r.f1) {
            const double expect =
                2.0 * *r.completeness * *r.correctness / (*r.completeness + *r.correctness);
            CHECK(*r.f1 == doctest::Approx(expect).epsilon(1e-9));
        }
        for (const auto& v : {r.completeness, r.correctness, r.quality, r.f1}) {
            if (v) {
                CHECK(*v >= 0.0);
                CHECK(*v <= 100.0);
            }
        }
    }
}

TEST_CASE("sweep reproduces the golden M column for 4-class left_only") {
    // Confidence buckets sized from the cumulative golden counts:
    // 283 at >=0.75, then +174, +209, +155, +187 down the floors.
    struct Bucket {
        double conf;
        int count;
    };
    const std::vector<Bucket> buckets = {
        {0.80, 283}, {0.60, 174}, {0.30, 209}, {0.15, 155}, {0.07, 187}};
    std::vector<aggregate::WorldDetection> ds;
    double x = 0.0;
    for (const auto& b : buckets) {
        for (int i = 0; i < b.count; ++i) {
            ds.push_back(det(LaneLabel::left_only, {x, 0.0, x + 5.0, 5.0}, b.conf));
            x += 10.0;
        }
    }
    const auto rows = sweep({}, ds, LaneLabel::left_only);
    REQUIRE(rows.size() == 5);
    const long expect_m[] = {283, 457, 666, 821, 1008};
    for (int i = 0; i < 5; ++i) CHECK(rows[static_cast<std::size_t>(i)].counts.model_total == expect_m[i]);
}

TEST_CASE("sweep of an empty detector reports M=0 and N/A correctness at every floor") {
    const std::vector<GroundTruthPoint> gt = {{{1, 1}, LaneLabel::center}};
    const auto rows = sweep(gt, {}, LaneLabel::center);
    for (const auto& r : rows) {
        CHECK(r.counts.model_total == 0);
        CHECK(*r.completeness == doctest::Approx(0.0));
        CHECK(!r.correctness.has_value());
    }
}

TEST_CASE("M, TP, and completeness are non-increasing as the floor rises") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const auto scene = random_scene(rng, 40, 120);
        const auto rows = sweep(scene.gt, scene.ds, LaneLabel::left_only);
        // Rows are ordered by descending floor; read upward = rising floor.
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i - 1].counts.model_total <= rows[i].counts.model_total);
            CHECK(rows[i - 1].counts.tp <= rows[i].counts.tp);
            if (rows[i - 1].completeness && rows[i].completeness)
                CHECK(*rows[i - 1].completeness <= *rows[i].completeness + 1e-12);
        }
    }
}

TEST_CASE("sweep floors must descend") {
    CHECK_THROWS_AS(sweep({}, {}, LaneLabel::center, {0.05, 0.10}), input_error);
}

TEST_CASE("circus CSV emission") {
    SUBCASE("one row in, one data line plus header out") {
        ClassSweep s{"4-class", LaneLabel::center, {metrics({10, 8, 7, 1, 3}, 0.75)}};
        const auto csv = emit_circus_csv({s});
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
        CHECK(csv.find("model,class,confidence_floor,tp,fp,fn,completeness,correctness,quality,"
                       "f1\n") == 0);
        CHECK(csv.find("4-class,center,0.75,7,1,3,") != std::string::npos);
    }

    SUBCASE("the full fixture yields 30 data lines and tp+fp sums to M") {
        std::vector<ClassSweep> sweeps;
        long m_total = 0;
        const auto& rows = fixtures::golden_metric_rows();
        for (std::size_t i = 0; i < rows.size(); i += 5) {
            ClassSweep s;
            s.model = rows[i].model;
            s.cls = rows[i].cls;
            for (std::size_t j = i; j < i + 5; ++j) {
                s.rows.push_back(metrics({rows[j].gt, rows[j].m, rows[j].tp, rows[j].fp,
                                          rows[j].fn},
                                         rows[j].confidence / 100.0));
                m_total += rows[j].m;
            }
            sweeps.push_back(std::move(s));
        }
        const auto csv = emit_circus_csv(sweeps);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 31); // header + 30

        long tp_fp_total = 0;
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            // Fields: model,class,floor,tp,fp,...
            std::istringstream fields(line);
            std::string f;
            for (int k = 0; k < 3; ++k) std::getline(fields, f, ',');
            std::getline(fields, f, ',');
            tp_fp_total += std::stol(f);
            std::getline(fields, f, ',');
            tp_fp_total += std::stol(f);
        }
        CHECK(tp_fp_total == m_total);
    }
}

TEST_CASE("lane grouping chains collinear same-class points within the gap") {
    auto pt = [](double x, double y, LaneLabel l) {
        return aggregate::DetectionPoint{l, {x, y}, 0.9, {"t", 0, 0}};
    };
    // Four consecutive left arrows 50 ft apart, one far-away left arrow, and
    // one right arrow sitting inside the chain.
    const std::vector<aggregate::DetectionPoint> points = {
        pt(0, 0, LaneLabel::left_only),    pt(50, 1, LaneLabel::left_only),
        pt(100, 0, LaneLabel::left_only),  pt(150, -1, LaneLabel::left_only),
        pt(400, 0, LaneLabel::left_only),  pt(75, 0.5, LaneLabel::right_only),
    };
    const auto lanes = group_lanes(points, 60.0);
    REQUIRE(lanes.size() == 3);
    CHECK(lanes[0].members == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(lanes[0].label == LaneLabel::left_only);
    CHECK(lanes[1].members == std::vector<std::size_t>{4});
    CHECK(lanes[2].members == std::vector<std::size_t>{5});
    CHECK(lanes[2].label == LaneLabel::right_only);
}

TEST_CASE("lane grouping splits chains that bend off axis") {
    auto pt = [](double x, double y) {
        return aggregate::DetectionPoint{LaneLabel::left_only, {x, y}, 0.9, {"t", 0, 0}};
    };
    // An L-shaped chain: the corner points cannot be one straight lane.
    const std::vector<aggregate::DetectionPoint> points = {
        pt(0, 0), pt(50, 0), pt(100, 0), pt(100, 50), pt(100, 100)};
    const auto lanes = group_lanes(points, 60.0, 6.0);
    CHECK(lanes.size() >= 2);
    std::size_t total = 0;
    for (const auto& l : lanes) total += l.members.size();
    CHECK(total == points.size()); // a partition, nothing dropped
}

TEST_CASE("metrics CSV mirrors the golden table layout") {
    ClassSweep s{"4-class", LaneLabel::left_only,
                 {metrics({1723, 283, 275, 8, 1448}, 0.75)}};
    std::ostringstream out;
    write_metrics_csv(out, {s});
    const auto text = out.str();
    CHECK(text.find("Class,Confidence,M,TP,FP,FN,Completeness,Correctness,Quality,F1\n") == 0);
    CHECK(text.find("left_only,75,283,275,8,1448,15.96,97.17,15.89,27.42\n") != std::string::npos);
}
