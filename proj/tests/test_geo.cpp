#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lanemark/geo.hpp"
#include "lanemark/errors.hpp"

#include <cmath>
#include <random>

using namespace lanemark;
using namespace lanemark::geo;

namespace {

// Dense-sampling distance oracle: walk the polyline in small steps.
double sampled_polyline_distance(const WorldPoint& p, const RoadCenterline& line, double step) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.vertices.size(); ++i) {
        const auto& a = line.vertices[i];
        const auto& b = line.vertices[i + 1];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            best = std::min(best, std::hypot(p.x - (a.x + t * (b.x - a.x)),
                                             p.y - (a.y + t * (b.y - a.y))));
        }
    }
    return best;
}

} // namespace

TEST_CASE("pixel_to_world maps the origin and affine offsets") {
    const GeoTransform t{1000.0, 2000.0, 0.5};
    const auto o = pixel_to_world(0, 0, t);
    CHECK(o.x == doctest::Approx(1000.0));
    CHECK(o.y == doctest::Approx(2000.0));
    const auto p = pixel_to_world(10, 10, t);
    CHECK(p.x == doctest::Approx(1005.0));
    CHECK(p.y == doctest::Approx(1995.0));
}

TEST_CASE("world_to_pixel inverts the two fixed examples") {
    const GeoTransform t{1000.0, 2000.0, 0.5};
    const auto a = world_to_pixel({1000.0, 2000.0}, t);
    CHECK(a.col == doctest::Approx(0.0));
    CHECK(a.row == doctest::Approx(0.0));
    const auto b = world_to_pixel({1005.0, 1995.0}, t);
    CHECK(b.col == doctest::Approx(10.0));
    CHECK(b.row == doctest::Approx(10.0));
}

TEST_CASE("pixel<->world round-trips within 1e-9 relative") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coord(-5000.0, 5000.0);
    std::uniform_real_distribution<double> px(0.05, 3.0);
    for (int i = 0; i < 100; ++i) {
        const GeoTransform t{coord(rng), coord(rng), px(rng)};
        const double col = std::abs(coord(rng));
        const double row = std::abs(coord(rng));
        const auto back = world_to_pixel(pixel_to_world(col, row, t), t);
        CHECK(back.col == doctest::Approx(col).epsilon(1e-9));
        CHECK(back.row == doctest::Approx(row).epsilon(1e-9));
        const WorldPoint w{coord(rng), coord(rng)};
        const auto pc = world_to_pixel(w, t);
        const auto w2 = pixel_to_world(pc.col, pc.row, t);
        CHECK(w2.x == doctest::Approx(w.x).epsilon(1e-9));
        CHECK(w2.y == doctest::Approx(w.y).epsilon(1e-9));
    }
}

TEST_CASE("distance_point_to_polyline basics") {
    const RoadCenterline line{"r", {{0, 0}, {100, 0}}, RoadSystem::State};
    CHECK(distance_point_to_polyline({0, 0}, line) == doctest::Approx(0.0));
    CHECK(distance_point_to_polyline({0, 50}, line) == doctest::Approx(50.0));
    CHECK(distance_point_to_polyline({150, 0}, line) == doctest::Approx(50.0));
}

TEST_CASE("distance_point_to_polyline matches 0.01-ft sampling oracle within 0.02 ft") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> coord(-40.0, 140.0);
    const RoadCenterline line{"zig", {{0, 0}, {40, 25}, {80, -10}, {120, 30}}, RoadSystem::Local};
    for (int i = 0; i < 1000; ++i) {
        const WorldPoint p{coord(rng), coord(rng)};
        const double exact = distance_point_to_polyline(p, line);
        const double sampled = sampled_polyline_distance(p, line, 0.01);
        CHECK(std::abs(exact - sampled) <= 0.02);
    }
}

TEST_CASE("distance is translation invariant") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coord(-100.0, 100.0);
    const RoadCenterline base{"t", {{0, 0}, {30, 40}, {70, 10}}, RoadSystem::State};
    for (int i = 0; i < 200; ++i) {
        const WorldPoint p{coord(rng), coord(rng)};
        const double dx = coord(rng), dy = coord(rng);
        RoadCenterline moved = base;
        for (auto& v : moved.vertices) {
            v.x += dx;
            v.y += dy;
        }
        const double d0 = distance_point_to_polyline(p, base);
        const double d1 = distance_point_to_polyline({p.x + dx, p.y + dy}, moved);
        CHECK(d1 == doctest::Approx(d0).epsilon(1e-9));
    }
}

TEST_CASE("overlap_ratio fixed values") {
    const WorldBox a{0, 0, 1, 1};
    CHECK(overlap_ratio(a, a) == doctest::Approx(1.0));
    CHECK(overlap_ratio(a, {5, 5, 6, 6}) == doctest::Approx(0.0));
    // Unit box shifted 0.5 in x: intersection 0.5, union 1.5.
    CHECK(overlap_ratio(a, {0.5, 0, 1.5, 1}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("overlap_ratio is symmetric, bounded, and 1 only for identical boxes") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    auto random_box = [&]() {
        const double x1 = coord(rng), x2 = coord(rng);
        const double y1 = coord(rng), y2 = coord(rng);
        return WorldBox{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
    };
    for (int i = 0; i < 500; ++i) {
        const auto a = random_box();
        const auto b = random_box();
        const double ab = overlap_ratio(a, b);
        CHECK(ab == doctest::Approx(overlap_ratio(b, a)));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        if (!(a == b)) CHECK(ab < 1.0);
    }
}

TEST_CASE("point_in_box boundary rule and brute-force oracle") {
    const WorldBox b{0, 0, 10, 10};
    CHECK(point_in_box({0, 0}, b));      // corner is inside
    CHECK(point_in_box({10, 10}, b));
    CHECK(!point_in_box({11, 5}, b));    // 1 ft outside

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coord(-15.0, 15.0);
    for (int i = 0; i < 500; ++i) {
        const WorldPoint p{coord(rng), coord(rng)};
        const double x1 = coord(rng), x2 = coord(rng);
        const double y1 = coord(rng), y2 = coord(rng);
        const WorldBox box{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
        const bool oracle = p.x >= box.min_x && p.x <= box.max_x && p.y >= box.min_y && p.y <= box.max_y;
        CHECK(point_in_box(p, box) == oracle);
    }
}

TEST_CASE("point_in_box implies positive overlap with an epsilon box at the point") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> coord(0.0, 10.0);
    const WorldBox b{0, 0, 10, 10};
    for (int i = 0; i < 200; ++i) {
        const WorldPoint p{coord(rng), coord(rng)};
        REQUIRE(point_in_box(p, b));
        const double eps = 1e-6;
        const WorldBox tiny{p.x - eps, p.y - eps, p.x + eps, p.y + eps};
        CHECK(overlap_ratio(b, tiny) > 0.0);
    }
}

TEST_CASE("distance_segment_to_box") {
    const WorldBox box{0, 0, 10, 10};
    CHECK(distance_segment_to_box({-5, 5}, {15, 5}, box) == doctest::Approx(0.0)); // crosses
    CHECK(distance_segment_to_box({2, 2}, {8, 8}, box) == doctest::Approx(0.0));   // inside
    CHECK(distance_segment_to_box({20, 0}, {20, 10}, box) == doctest::Approx(10.0));
    CHECK(distance_segment_to_box({15, 15}, {25, 15}, box) ==
          doctest::Approx(std::hypot(5.0, 5.0)));
}

TEST_CASE("invalid inputs throw input_error") {
    CHECK_THROWS_AS(overlap_ratio({1, 0, 0, 1}, {0, 0, 1, 1}), input_error);
    CHECK_THROWS_AS(distance_point_to_polyline({0, 0}, {"x", {{0, 0}}, RoadSystem::State}),
                    input_error);
}
