#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wams/citygen.hpp"
#include "wams/rng.hpp"

#include <cmath>

using namespace wams;

namespace {

BuildingFootprint square(std::int64_t id, Vec2 lo, double side,
                         BuildingClass cls = BuildingClass::Residential) {
    // CCW: walls are south(0), east(1), north(2), west(3)
    return {id,
            {lo, {lo.x + side, lo.y}, {lo.x + side, lo.y + side}, {lo.x, lo.y + side}},
            cls};
}

PathNetwork footway(NodeId base, Vec2 a, Vec2 b) {
    PathNetwork net;
    net.nodes[base] = a;
    net.nodes[base + 1] = b;
    PathEdge e;
    e.id = base;
    e.from = base;
    e.to = base + 1;
    e.shape = {a, b};
    net.edges[base] = e;
    net.relabel_components();
    return net;
}

void add_footway(PathNetwork& net, NodeId base, Vec2 a, Vec2 b) {
    PathNetwork add = footway(base, a, b);
    net.nodes.insert(add.nodes.begin(), add.nodes.end());
    net.edges.insert(add.edges.begin(), add.edges.end());
    net.relabel_components();
}

RoadNetwork straight_road(Vec2 a, Vec2 b, int lanes = 1, bool sidewalk = true) {
    RoadNetwork net;
    net.nodes[1] = a;
    net.nodes[2] = b;
    RoadEdge e;
    e.id = 1;
    e.from = 1;
    e.to = 2;
    e.lanes = lanes;
    e.sidewalk = sidewalk;
    e.shape = {a, b};
    net.edges[1] = e;
    return net;
}

} // namespace

TEST_CASE("building heights respect class range, area scaling and jitter bounds") {
    CitygenConfig cfg;
    const HeightRange& hr = cfg.heights.at(BuildingClass::Residential);

    // 20x20 = 400 m^2 reaches the class maximum
    BuildingFootprint big = square(7, {0, 0}, 20.0);
    double h = extrude_building(big, cfg, 42);
    CHECK(h >= hr.max_h * (1.0 - cfg.height_jitter) - 1e-12);
    CHECK(h <= hr.max_h * (1.0 + cfg.height_jitter) + 1e-12);

    // 10x10 = 100 m^2 -> quarter of the way up the range
    BuildingFootprint small = square(8, {0, 0}, 10.0);
    double base = hr.min_h + (hr.max_h - hr.min_h) * 0.25;
    double hs = extrude_building(small, cfg, 42);
    CHECK(hs >= base * (1.0 - cfg.height_jitter) - 1e-12);
    CHECK(hs <= base * (1.0 + cfg.height_jitter) + 1e-12);

    // deterministic per (seed, id), independent of call order
    CHECK(extrude_building(big, cfg, 42) == h);
    CHECK(extrude_building(big, cfg, 43) != h);
    CHECK(extrude_building(square(9, {5, 5}, 20.0), cfg, 42) != h);

    BuildingFootprint degenerate{1, {{0, 0}, {1, 0}, {2, 0}}, BuildingClass::Other};
    CHECK_THROWS_AS(extrude_building(degenerate, cfg, 1), std::invalid_argument);
}

TEST_CASE("footpath probe picks the nearest path and lands on it") {
    BuildingFootprint b = square(1, {0, 0}, 10.0);
    // footway 4 m south of the building, far one 12 m north
    PathNetwork paths = footway(100, {-50, -4}, {50, -4});
    add_footway(paths, 200, {-50, 22}, {50, 22});
    RoadNetwork roads;

    auto r = generate_footpath(b, {b}, paths, roads);
    REQUIRE(r.has_value());
    CHECK(r->doorway.x == doctest::Approx(5.0));
    CHECK(r->doorway.y == doctest::Approx(0.0));
    CHECK(r->gateway.x == doctest::Approx(5.0));
    CHECK(r->gateway.y == doctest::Approx(-4.0));
    CHECK(polyline_length(r->footpath) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK_FALSE(r->stop_point.has_value());
}

TEST_CASE("probes longer than the cutoff leave the building unreachable") {
    BuildingFootprint b = square(1, {0, 0}, 10.0);
    PathNetwork paths = footway(100, {-50, -40}, {50, -40}); // 40 m away on every side
    RoadNetwork roads;
    CHECK_FALSE(generate_footpath(b, {b}, paths, roads).has_value());
}

TEST_CASE("a wall of another building blocks the probe") {
    BuildingFootprint b = square(1, {0, 0}, 10.0);
    BuildingFootprint blocker = square(2, {-2, -8}, 14.0); // spans the south probe
    PathNetwork paths = footway(100, {-50, -20}, {50, -20});
    add_footway(paths, 200, {-50, 35}, {50, 35}); // north at 25 m: reachable
    RoadNetwork roads;

    auto r = generate_footpath(b, {b, blocker}, paths, roads);
    REQUIRE(r.has_value());
    CHECK(r->gateway.y == doctest::Approx(35.0)); // forced to the north wall
}

TEST_CASE("a junction disc in the way discards the probe") {
    BuildingFootprint b = square(1, {0, 0}, 10.0);
    PathNetwork paths = footway(100, {-50, -10}, {50, -10});
    RoadNetwork roads;
    roads.nodes[5] = {5.0, -6.0};
    roads.junctions[5] = {5, {}, 3.0}; // disc across the south probe

    CHECK_FALSE(generate_footpath(b, {b}, paths, roads).has_value());

    roads.junctions.clear();
    CHECK(generate_footpath(b, {b}, paths, roads).has_value());
}

TEST_CASE("equal-length probes resolve to the lowest wall index") {
    BuildingFootprint b = square(1, {0, 0}, 10.0);
    // equidistant paths south (wall 0) and east (wall 1)
    PathNetwork paths = footway(100, {-50, -5}, {50, -5});
    add_footway(paths, 200, {15, -50}, {15, 50});
    RoadNetwork roads;

    auto r = generate_footpath(b, {b}, paths, roads);
    REQUIRE(r.has_value());
    CHECK(r->gateway.x == doctest::Approx(5.0)); // south wall midpoint
    CHECK(r->gateway.y == doctest::Approx(-5.0));
}

TEST_CASE("probe extension finds the near lane centerline behind the sidewalk") {
    BuildingFootprint b = square(1, {0, 0}, 10.0);
    PathNetwork paths = footway(100, {-50, -4}, {50, -4});
    // single-lane road centerline 8 m south; carriageway half-width 3.2 m,
    // so the lane on the building side runs at y = -8 + 1.6 = -6.4
    RoadNetwork roads = straight_road({-50, -8}, {50, -8});

    auto r = generate_footpath(b, {b}, paths, roads);
    REQUIRE(r.has_value());
    REQUIRE(r->stop_point.has_value());
    CHECK(r->stop_point->x == doctest::Approx(5.0));
    CHECK(r->stop_point->y == doctest::Approx(-6.4));
    CHECK(r->stop_edge == 1);
    CHECK(r->stop_arc == doctest::Approx(55.0)); // x=-50 .. x=5 along the shape
}

TEST_CASE("transfer points sit at segment midpoints with lane and sidewalk offsets") {
    RoadNetwork roads;
    roads.nodes[1] = {0, 0};
    roads.nodes[2] = {100, 0};
    RoadEdge e;
    e.id = 1;
    e.from = 1;
    e.to = 2;
    e.lanes = 1;
    e.shape = {{0, 0}, {40, 0}, {100, 0}}; // two polyline segments
    roads.edges[1] = e;
    PathNetwork paths;

    auto tps = generate_transfer_points(roads, paths, 1.0);
    REQUIRE(tps.size() == 2);
    // direction +x, right side is -y
    CHECK(tps[0].wait_point.x == doctest::Approx(20.0));
    CHECK(tps[0].wait_point.y == doctest::Approx(-(3.2 + 1.0)));
    CHECK(tps[0].stop_point.y == doctest::Approx(-(3.2 - 1.6)));
    CHECK(tps[0].road_arc == doctest::Approx(20.0));
    CHECK(tps[1].wait_point.x == doctest::Approx(70.0));
    CHECK(tps[1].road_arc == doctest::Approx(70.0));
    CHECK(tps[0].forward);

    // a junction disc over the first midpoint suppresses that transfer point
    roads.nodes[9] = {20.0, 0.0};
    roads.junctions[9] = {9, {}, 5.0};
    auto tps2 = generate_transfer_points(roads, paths, 1.0);
    REQUIRE(tps2.size() == 1);
    CHECK(tps2[0].road_arc == doctest::Approx(70.0));

    // no sidewalk, no transfer points
    roads.junctions.clear();
    roads.edges[1].sidewalk = false;
    CHECK(generate_transfer_points(roads, paths, 1.0).empty());
}

TEST_CASE("gateway linking matches a linear-scan oracle over random layouts") {
    Rng rng(2026);
    std::vector<TransferPoint> tps;
    for (int i = 0; i < 50; ++i) {
        TransferPoint tp;
        tp.id = i + 1;
        tp.wait_point = {rng.uniform(-500, 500), rng.uniform(-500, 500)};
        tps.push_back(tp);
    }
    for (int trial = 0; trial < 200; ++trial) {
        Vec2 g{rng.uniform(-500, 500), rng.uniform(-500, 500)};
        const TransferPoint& got = link_gateway(g, tps);
        // oracle: plain scan for the minimum distance
        double best = 1e300;
        std::int64_t best_id = -1;
        for (const TransferPoint& tp : tps) {
            double d = dist(g, tp.wait_point);
            if (d < best) {
                best = d;
                best_id = tp.id;
            }
        }
        CHECK(got.id == best_id);
    }

    // exact tie resolves to the lower id
    std::vector<TransferPoint> pair(2);
    pair[0].id = 7;
    pair[0].wait_point = {10, 0};
    pair[1].id = 3;
    pair[1].wait_point = {-10, 0};
    CHECK(link_gateway({0, 0}, pair).id == 3);
    CHECK_THROWS_AS(link_gateway({0, 0}, {}), std::invalid_argument);
}

TEST_CASE("city assembly links buildings and reports unreachable ones") {
    RoadNetwork roads = straight_road({-100, -8}, {100, -8});
    PathNetwork paths = footway(100, {-100, -4}, {100, -4});
    // mark the footway as the road's right-hand sidewalk so midpoints attach to it
    paths.edges.at(100).kind = PathKind::Sidewalk;
    paths.edges.at(100).source_road = 1;
    paths.edges.at(100).side = 1;

    std::vector<BuildingFootprint> fps = {
        square(1, {-5, 0}, 10.0),   // direct roadside access
        square(2, {200, 200}, 10.0) // far from everything
    };
    CitygenConfig cfg;
    auto city = build_city(fps, paths, roads, cfg, 99);

    REQUIRE(city.buildings.size() == 2);
    const Building& ok = city.buildings[0];
    CHECK(ok.routable);
    REQUIRE(ok.transfer_id.has_value());
    CHECK(ok.stop_point.has_value());
    CHECK(ok.height > 0.0);

    const Building& bad = city.buildings[1];
    CHECK_FALSE(bad.routable);
    CHECK_FALSE(bad.transfer_id.has_value());
    REQUIRE(city.log.size() == 1);
    CHECK(city.log[0].find("building 2") != std::string::npos);

    // the probe transfer point got an id after the midpoint ones
    bool found = false;
    for (const auto& tp : city.transfer_points) {
        if (tp.id == *ok.transfer_id) {
            found = true;
            CHECK(tp.source == TransferPoint::Source::BuildingProbe);
            CHECK(tp.road_edge == 1);
        }
    }
    CHECK(found);

    // reruns are identical
    auto city2 = build_city(fps, paths, roads, cfg, 99);
    REQUIRE(city2.buildings.size() == city.buildings.size());
    for (std::size_t i = 0; i < city.buildings.size(); ++i) {
        CHECK(city2.buildings[i].height == city.buildings[i].height);
        CHECK(city2.buildings[i].gateway.x == city.buildings[i].gateway.x);
        CHECK(city2.buildings[i].gateway.y == city.buildings[i].gateway.y);
    }
}
