#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wams/procgen.hpp"
#include "wams/rng.hpp"
#include "wams/visibility.hpp"

#include <cmath>
#include <sstream>

using namespace wams;

namespace {

// independent Moller-Trumbore oracle, no shared code with the library test
std::optional<double> moller_trumbore(const Ray3& r, const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 p = r.dir.cross(e2);
    double det = e1.dot(p);
    if (std::abs(det) < 1e-14) return std::nullopt;
    double inv = 1.0 / det;
    Vec3 tv = r.origin - a;
    double u = tv.dot(p) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
    Vec3 q = tv.cross(e1);
    double v = r.dir.dot(q) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return std::nullopt;
    double t = e2.dot(q) * inv;
    if (t < 1e-12) return std::nullopt;
    return t;
}

Vec3 random_unit(Rng& rng) {
    // Box-Muller-free: rejection sample the unit ball
    for (;;) {
        Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        double n = v.norm();
        if (n > 1e-3 && n <= 1.0) return v * (1.0 / n);
    }
}

RayCaster desk_city_caster() {
    GridCityConfig cfg;
    cfg.rows = 6;
    cfg.cols = 6;
    GridCity city = generate_grid_city(cfg, 7);
    auto built = build_city(city.buildings, city.paths, city.roads, {}, 7);
    RayCaster rc;
    // terrain in 8 x 8 patches, each with its own box
    Vec2 lo{cfg.origin_easting - 100, cfg.origin_northing - 100};
    Vec2 hi{cfg.origin_easting + cfg.cols * cfg.block + 100,
            cfg.origin_northing + cfg.rows * cfg.block + 100};
    for (int iy = 0; iy < 8; ++iy)
        for (int ix = 0; ix < 8; ++ix) {
            Vec2 plo{lo.x + (hi.x - lo.x) * ix / 8.0, lo.y + (hi.y - lo.y) * iy / 8.0};
            Vec2 phi{lo.x + (hi.x - lo.x) * (ix + 1) / 8.0,
                     lo.y + (hi.y - lo.y) * (iy + 1) / 8.0};
            rc.objects.push_back(mesh_terrain_patch(plo, phi, 0.0, 10000 + iy * 8 + ix));
        }
    for (const Building& b : built.buildings)
        rc.objects.push_back(mesh_prism(b.footprint.ring, 0.0, b.height, b.footprint.id));
    return rc;
}

} // namespace

TEST_CASE("axis-aligned hit and parallel miss") {
    Tri t = make_tri({0, 0, 1}, {1, 0, 1}, {0, 1, 1});
    Ray3 up{{0.2, 0.2, 0.0}, {0, 0, 1}};
    auto d = ray_triangle(up, t);
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(1.0).epsilon(1e-12));

    Ray3 parallel{{0.2, 0.2, 0.0}, {1, 0, 0}};
    CHECK_FALSE(ray_triangle(parallel, t).has_value());
    Ray3 behind{{0.2, 0.2, 2.0}, {0, 0, 1}};
    CHECK_FALSE(ray_triangle(behind, t).has_value());
}

TEST_CASE("precomputed test agrees with an independent intersector on fuzz") {
    Rng rng(1234);
    int disagreements = 0;
    int hits = 0;
    for (int i = 0; i < 100000; ++i) {
        Vec3 a{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Vec3 b{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Vec3 c{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Ray3 r{{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)},
               random_unit(rng)};
        auto mine = ray_triangle(r, make_tri(a, b, c));
        auto ref = moller_trumbore(r, a, b, c);
        if (mine.has_value() != ref.has_value()) {
            ++disagreements;
        } else if (mine && std::abs(*mine - *ref) > 1e-9) {
            ++disagreements;
        }
        if (mine) ++hits;
    }
    CHECK(disagreements == 0);
    CHECK(hits > 100); // the fuzz corpus actually exercises the hit path
}

TEST_CASE("slab test: inside origin, miss, and interval ordering") {
    Aabb3 box{{0, 0, 0}, {1, 2, 3}};
    Ray3 inside{{0.5, 1.0, 1.5}, {1, 0, 0}};
    auto iv = aabb_interval(inside, box);
    REQUIRE(iv.has_value());
    CHECK(iv->first == doctest::Approx(0.0));
    CHECK(iv->second == doctest::Approx(0.5));

    Ray3 away{{2, 1, 1}, {1, 0, 0}};
    CHECK_FALSE(aabb_interval(away, box).has_value());

    Ray3 toward{{-1, 1, 1}, {1, 0, 0}};
    auto iv2 = aabb_interval(toward, box);
    REQUIRE(iv2.has_value());
    CHECK(iv2->first == doctest::Approx(1.0));
}

TEST_CASE("culling changes no answer and cuts triangle work by 5x or more") {
    RayCaster rc = desk_city_caster();
    Rng rng(55);
    Vec2 lo{400000 - 50, 5900000 - 50}, hi{400000 + 770, 5900000 + 770};

    struct Answer {
        bool hit;
        double d;
        std::size_t obj;
    };
    std::vector<Ray3> rays;
    for (int i = 0; i < 10000; ++i) {
        Vec3 origin{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y),
                    rng.uniform(100, 600)};
        Vec3 dir = random_unit(rng);
        if (dir.z > -0.1) dir.z = -0.1 - std::abs(dir.z); // look mostly down
        rays.push_back({origin, dir.normalized()});
    }

    std::vector<Answer> with, without;
    rc.use_aabb = true;
    rc.reset_counters();
    for (const Ray3& r : rays) {
        auto h = rc.first_hit(r);
        with.push_back({h.has_value(), h ? h->distance : 0.0, h ? h->object : 0});
    }
    std::uint64_t culled_tests = rc.triangle_tests;

    rc.use_aabb = false;
    rc.reset_counters();
    for (const Ray3& r : rays) {
        auto h = rc.first_hit(r);
        without.push_back({h.has_value(), h ? h->distance : 0.0, h ? h->object : 0});
    }
    std::uint64_t brute_tests = rc.triangle_tests;

    int mismatches = 0;
    for (std::size_t i = 0; i < rays.size(); ++i) {
        if (with[i].hit != without[i].hit || with[i].obj != without[i].obj ||
            std::abs(with[i].d - without[i].d) > 1e-9)
            ++mismatches;
    }
    CHECK(mismatches == 0);
    CHECK(brute_tests >= 5 * culled_tests);
}

TEST_CASE("entity visibility: occlusion, open ground and pixel thresholds") {
    RayCaster rc;
    rc.objects.push_back(mesh_terrain_patch({-5000, -5000}, {5000, 5000}, 0.0, 1));
    // a 30 m wall between the camera and the target
    rc.objects.push_back(mesh_prism({{40, -50}, {42, -50}, {42, 10}, {40, 10}}, 0.0, 30.0, 2));

    CameraView cam;
    cam.position = {0, 0, 20};
    cam.boresight = Vec3{1, 0, -0.05}.normalized();
    cam.fov_deg = 60.0;
    cam.delta_theta = 1e-3;

    double car[3] = {4.5, 1.8, 1.5};
    auto blocked = entity_visible(cam, {100, 0, 0.75}, car, rc);
    CHECK(blocked.in_frustum);
    CHECK(blocked.unoccluded_fraction == doctest::Approx(0.0));
    CHECK_FALSE(blocked.visible);

    auto open = entity_visible(cam, {100, 50, 0.75}, car, rc);
    CHECK(open.in_frustum);
    CHECK(open.unoccluded_fraction == doctest::Approx(1.0));
    CHECK(open.visible);

    auto behind_cam = entity_visible(cam, {-100, 0, 0.75}, car, rc);
    CHECK_FALSE(behind_cam.in_frustum);
    CHECK_FALSE(behind_cam.visible);

    // 1 m object from 5334 m at 25 urad/px spans about 7.5 px
    CameraView nadir;
    nadir.position = {0, 0, 5334};
    nadir.delta_theta = 25e-6;
    RayCaster empty;
    double small_obj[3] = {1.0, 1.0, 1.0};
    VisibilityConfig strict;
    strict.min_pixels = 10.0;
    auto r10 = entity_visible(nadir, {0, 0, 0.5}, small_obj, empty, strict);
    CHECK(r10.pixel_extent == doctest::Approx(7.5).epsilon(0.01));
    CHECK_FALSE(r10.visible);
    VisibilityConfig loose;
    loose.min_pixels = 5.0;
    CHECK(entity_visible(nadir, {0, 0, 0.5}, small_obj, empty, loose).visible);
}

TEST_CASE("count_visible matches per-entity recomputation") {
    RayCaster rc;
    rc.objects.push_back(mesh_terrain_patch({-5000, -5000}, {5000, 5000}, 0.0, 1));
    rc.objects.push_back(mesh_prism({{40, -50}, {42, -50}, {42, 10}, {40, 10}}, 0.0, 30.0, 2));

    Snapshot snap;
    snap.entities.push_back({'v', 1, {100, 0}, 0, 0, "car", -1});   // occluded
    snap.entities.push_back({'v', 2, {100, 50}, 0, 0, "car", -1});  // open
    snap.entities.push_back({'p', 3, {90, 50}, 0, 0, "WALK_IN_NETWORK", -1});

    CameraView cam;
    cam.position = {0, 0, 20};
    cam.boresight = Vec3{1, 0, -0.05}.normalized();
    cam.delta_theta = 1e-3;

    auto totals = count_visible(cam, snap, rc);
    CHECK(totals["car"] == 1);
    CHECK(totals["person"] == 1);

    CameraView away = cam;
    away.boresight = Vec3{-1, 0, -0.05}.normalized();
    CHECK(count_visible(away, snap, rc).empty());

    EntityBounds bounds;
    int recount = 0;
    for (const EntityRecord& r : snap.entities) {
        const double* e = bounds.for_record(r);
        if (entity_visible(cam, {r.pos.x, r.pos.y, e[2] / 2}, e, rc).visible) ++recount;
    }
    int total = 0;
    for (const auto& [k, n] : totals) total += n;
    CHECK(total == recount);
}

TEST_CASE("truth logs round-trip through the parser and answer queries") {
    CityScene s = [] {
        GridCityConfig cfg;
        cfg.rows = 3;
        cfg.cols = 3;
        GridCity city = generate_grid_city(cfg, 11);
        auto built = build_city(city.buildings, city.paths, city.roads, {}, 11);
        CityScene sc;
        sc.roads = std::move(city.roads);
        sc.paths = std::move(city.paths);
        sc.buildings = std::move(built.buildings);
        for (auto& tp : built.transfer_points) sc.tps[tp.id] = tp;
        return sc;
    }();
    const Building* a = nullptr;
    const Building* b = nullptr;
    for (const Building& x : s.buildings) {
        if (!x.routable) continue;
        if (!a) {
            a = &x;
        } else if (dist(x.gateway, a->gateway) > 200.0) {
            b = &x;
            break;
        }
    }
    REQUIRE(a);
    REQUIRE(b);

    Person p;
    p.id = 7;
    p.home = a->footprint.id;
    p.workplace = b->footprint.id;
    p.walk_speed = 1.4;
    Trip trip{7, Task::GoToWork, a->footprint.id, b->footprint.id, 0.0};
    SimConfig cfg;
    cfg.duration = 600.0;
    Simulation sim(s, {p}, {trip}, {}, cfg);
    sim.run();
    REQUIRE(sim.completed_trips() == 1);

    // serialize, then parse back through the query layer
    std::vector<Snapshot> parsed;
    for (const Snapshot& snap : sim.snapshots()) {
        std::ostringstream os;
        write_timestep_xml(os, snap);
        parsed.push_back(parse_timestep_xml(os.str()));
    }
    std::ostringstream eos;
    write_events_xml(eos, sim.events());
    auto events = parse_events_xml(eos.str());
    CHECK(events.size() == sim.events().size());

    TruthFilter by_id;
    by_id.id = 7;
    by_id.type = 'p';
    auto tracks = query_tracks(parsed, by_id);
    REQUIRE(tracks.size() == 1); // one unbroken outdoor track
    CHECK(dist(tracks[0].front().pos, a->doorway) < 2.0);
    CHECK(dist(tracks[0].back().pos, b->doorway) < 2.0);

    TruthFilter leaves, enters;
    leaves.kind = "LEAVE_BUILDING";
    enters.kind = "ENTER_BUILDING";
    CHECK(query_events(events, leaves).size() == query_events(events, enters).size());

    TruthFilter empty_range;
    empty_range.t_begin = 1e6;
    empty_range.t_end = 2e6;
    CHECK(query_events(events, empty_range).empty());
    CHECK(query_tracks(parsed, empty_range).empty());

    CHECK_THROWS_AS(parse_timestep_xml("<vehicle id=\"1\"/>"), std::runtime_error);
    CHECK_THROWS_AS(parse_timestep_xml("<timestep t=\"0\">\n<vehicle id=\"x\"/>"),
                    std::runtime_error);
}
