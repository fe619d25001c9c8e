// Acceptance gate: one pass/fail line per release criterion, with the
// measured values and the pinned tolerances printed alongside.
#include "wams/citygen.hpp"
#include "wams/geo.hpp"
#include "wams/imaging.hpp"
#include "wams/journey.hpp"
#include "wams/microsim.hpp"
#include "wams/population.hpp"
#include "wams/procgen.hpp"
#include "wams/rng.hpp"
#include "wams/sensor.hpp"
#include "wams/sim.hpp"
#include "wams/visibility.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace wams;

namespace {

struct Result {
    bool ok = true;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

CityScene grid_scene(int rows, int cols, std::uint64_t seed, bool centers = false) {
    GridCityConfig cfg;
    cfg.rows = rows;
    cfg.cols = cols;
    cfg.center_buildings = centers;
    GridCity city = generate_grid_city(cfg, seed);
    auto built = build_city(city.buildings, city.paths, city.roads, {}, seed);
    CityScene s;
    s.roads = std::move(city.roads);
    s.paths = std::move(city.paths);
    s.buildings = std::move(built.buildings);
    for (auto& tp : built.transfer_points) s.tps[tp.id] = tp;
    return s;
}

// ------------------------------------------------------------- criterion 1

Result c1_pointing() {
    Result r;
    ImagerSpec spec = argus_default();
    double want = -(28.0 + 1.0 / 3.0);
    double col1 = 0.0;
    for (int v = 1; v <= spec.n_v; ++v) {
        if (!spec.masked_in(v, 1)) continue;
        col1 = subcamera_pose(v, 1, spec).azimuth_deg;
        if (std::abs(col1 - want) > 1e-9) r.ok = false;
    }
    double max_az = 0.0, worst_sym = 0.0;
    for (int v = 1; v <= spec.n_v; ++v)
        for (int h = 1; h <= spec.n_h; ++h) {
            if (!spec.masked_in(v, h)) continue;
            auto a = subcamera_pose(v, h, spec);
            max_az = std::max(max_az, std::abs(a.azimuth_deg));
            if (!spec.masked_in(spec.n_v + 1 - v, spec.n_h + 1 - h)) {
                r.ok = false;
                continue;
            }
            auto b = subcamera_pose(spec.n_v + 1 - v, spec.n_h + 1 - h, spec);
            worst_sym = std::max(worst_sym, std::abs(a.azimuth_deg + b.azimuth_deg));
            worst_sym = std::max(worst_sym, std::abs(a.elevation_deg + b.elevation_deg));
        }
    if (std::abs(max_az - (28.0 + 1.0 / 3.0)) > 1e-9) r.ok = false;
    if (worst_sym > 1e-9) r.ok = false;
    r.detail = fmt("az(.,1)=%.7f (want %.7f), max|az|=%.7f, antisymmetry err %.2e "
                   "(tol 1e-9)",
                   col1, want, max_az, worst_sym);
    return r;
}

// ------------------------------------------------------------- criterion 2

Result c2_frame_bytes() {
    Result r;
    std::uint64_t bytes = frame_bytes(argus_default());
    std::uint64_t want = 368ull * 2592 * 1944 * 3;
    double gib = static_cast<double>(bytes) / (1024.0 * 1024.0 * 1024.0);
    r.ok = bytes == want && std::abs(gib - 5.18) / 5.18 < 0.005;
    r.detail = fmt("368x2592x1944x3 = %llu bytes = %.4f GiB (want 5.18 GiB +/-0.5%%), "
                   "computed arithmetically, no frame buffer allocated",
                   static_cast<unsigned long long>(bytes), gib);
    return r;
}

// ------------------------------------------------------------- criterion 3

Result c3_coverage_gsd() {
    Result r;
    ImagerSpec spec = argus_default();
    double area_km2 = array_ground_area(spec) / 1e6;
    PlatformPose rig;
    rig.position.altitude = 5334.0;
    Footprint fp = footprint(SubcameraPose{}, rig, spec);
    double gsd_cm = fp.center_gsd * 100.0;
    r.ok = fp.bounded && std::abs(area_km2 - 29.8) / 29.8 < 0.005 &&
           std::abs(fp.center_gsd - 0.13) / 0.13 < 0.03;
    r.detail = fmt("nadir area %.3f km^2 (want 29.8 +/-0.5%%), center GSD %.2f cm vs "
                   "published 13 cm (tol 3%%)",
                   area_km2, gsd_cm);
    return r;
}

// ------------------------------------------------------------- criterion 4

Result c4_eyepoint() {
    Result r;
    ImagerSpec full = argus_default();
    MosaicPlane fp = make_plane(full);
    if (fp.R != 40000.0) r.ok = false;

    ImagerSpec desk = argus_desk();
    MosaicPlane dp = make_plane(desk);
    double scale = mean_warp_scale(subcamera_pose(2, 2, desk), desk, dp);
    if (std::abs(scale - 1.0) > 0.01) r.ok = false;
    r.detail = fmt("R = 1/delta_theta = %.0f px exact for 25 urad (the published "
                   "41888 px does not follow from this relation and is not used); "
                   "desk central warp scale %.4f (tol 1%% of 1)",
                   fp.R, scale);
    return r;
}

// ------------------------------------------------------------- criterion 5

struct LegFixture {
    std::vector<BusRoute> routes;
    std::map<std::int64_t, TransferPoint> tps;
};

LegFixture random_leg_fixture(Rng& rng, int n_routes, int stops_per_route) {
    LegFixture f;
    std::int64_t next_tp = 1;
    for (int r = 0; r < n_routes; ++r) {
        BusRoute route;
        route.route_id = r;
        for (int s = 0; s < stops_per_route; ++s) {
            TransferPoint tp;
            tp.id = next_tp++;
            tp.wait_point = {rng.uniform(-3000, 3000), rng.uniform(-3000, 3000)};
            tp.stop_point = tp.wait_point;
            f.tps[tp.id] = tp;
            route.stops.push_back(tp.id);
        }
        f.routes.push_back(route);
    }
    return f;
}

// independent exhaustive enumeration over every (r, m, n) sequence
double exhaustive_cost(const Vec2& start, const Vec2& dest, const LegFixture& f,
                       int max_legs) {
    double best = dist(start, dest);
    struct Item {
        Vec2 pos;
        double cost;
        int depth;
    };
    std::vector<Item> frontier{{start, 0.0, 0}};
    while (!frontier.empty()) {
        Item it = frontier.back();
        frontier.pop_back();
        if (it.depth >= max_legs) continue;
        for (std::size_t r = 0; r < f.routes.size(); ++r) {
            const auto& stops = f.routes[r].stops;
            for (std::size_t m = 0; m < stops.size(); ++m) {
                for (std::size_t n = 0; n < stops.size(); ++n) {
                    if (m == n) continue;
                    double c = it.cost + dist(it.pos, f.tps.at(stops[m]).wait_point);
                    Vec2 npos = f.tps.at(stops[n]).wait_point;
                    best = std::min(best, c + dist(npos, dest));
                    frontier.push_back({npos, c, it.depth + 1});
                }
            }
        }
    }
    return best;
}

Result c5_planner() {
    Result r;
    Rng rng(31);
    int mismatches = 0;
    int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        int n_routes = 1 + static_cast<int>(rng.bounded(4));
        int stops = 3 + static_cast<int>(rng.bounded(3)); // <= 20 stops total
        int max_legs = 1 + static_cast<int>(rng.bounded(3));
        LegFixture f = random_leg_fixture(rng, n_routes, stops);
        Vec2 start{rng.uniform(-3000, 3000), rng.uniform(-3000, 3000)};
        Vec2 dest{rng.uniform(-3000, 3000), rng.uniform(-3000, 3000)};
        auto plan = select_bus_legs(start, dest, f.routes, f.tps, max_legs);
        double got = plan_walk_cost(start, dest, plan, f.routes, f.tps);
        double want = exhaustive_cost(start, dest, f, max_legs);
        if (std::abs(got - want) > 1e-9 || static_cast<int>(plan.size()) > max_legs)
            ++mismatches;
    }
    r.ok = mismatches == 0;
    r.detail = fmt("%d randomized fixtures (<=4 routes, <=20 stops, <=3 legs) vs "
                   "exhaustive enumeration: %d mismatches (tol 1e-9)",
                   trials, mismatches);
    return r;
}

// ------------------------------------------------------------- criterion 6

double seg_seg_dist(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
    if (segment_intersect(a1, a2, b1, b2)) return 0.0;
    double d = point_segment_distance(a1, b1, b2);
    d = std::min(d, point_segment_distance(a2, b1, b2));
    d = std::min(d, point_segment_distance(b1, a1, a2));
    return std::min(d, point_segment_distance(b2, a1, a2));
}

Result c6_city() {
    Result r;
    CityScene s = grid_scene(6, 6, 7, /*centers=*/true);
    int total = static_cast<int>(s.buildings.size());
    if (total < 200) r.ok = false;

    // footpath length bound and wall-crossing audit
    int routable = 0, unreachable = 0, too_long = 0, crossings = 0;
    double longest = 0.0;
    for (const Building& b : s.buildings) {
        if (!b.routable) {
            ++unreachable;
            continue;
        }
        ++routable;
        double len = polyline_length(b.footpath);
        longest = std::max(longest, len);
        if (len > 30.0 + 1e-6) ++too_long;
        for (std::size_t i = 0; i + 1 < b.footpath.size(); ++i) {
            const Vec2& p = b.footpath[i];
            const Vec2& q = b.footpath[i + 1];
            for (const Building& c : s.buildings) {
                const auto& ring = c.footprint.ring;
                for (std::size_t w = 0; w < ring.size(); ++w) {
                    const Vec2& w1 = ring[w];
                    const Vec2& w2 = ring[(w + 1) % ring.size()];
                    auto hit = segment_intersect(p, q, w1, w2);
                    if (!hit) continue;
                    Vec2 pt = p + (q - p) * hit->first;
                    // the doorway itself sits on the owning wall
                    if (dist(pt, b.footpath.front()) < 1e-6) continue;
                    ++crossings;
                }
            }
        }
    }

    // unreachable buildings really are more than 30 m from every path, by
    // exact wall-segment to path-segment distance
    int false_unreachable = 0;
    double nearest_unreachable = 1e30;
    for (const Building& b : s.buildings) {
        if (b.routable) continue;
        double dmin = 1e30;
        const auto& ring = b.footprint.ring;
        for (std::size_t w = 0; w < ring.size(); ++w) {
            const Vec2& w1 = ring[w];
            const Vec2& w2 = ring[(w + 1) % ring.size()];
            for (const auto& [eid, pe] : s.paths.edges)
                for (std::size_t i = 0; i + 1 < pe.shape.size(); ++i)
                    dmin = std::min(dmin,
                                    seg_seg_dist(w1, w2, pe.shape[i], pe.shape[i + 1]));
        }
        nearest_unreachable = std::min(nearest_unreachable, dmin);
        if (dmin <= 30.0) ++false_unreachable;
    }

    if (too_long || crossings || false_unreachable || unreachable == 0) r.ok = false;
    r.detail = fmt("%d buildings (%d routable, %d unreachable); longest footpath "
                   "%.2f m (cap 30), %d over-length, %d wall crossings; nearest "
                   "path to an unreachable building %.2f m (> 30 required), %d "
                   "flagged despite a reachable wall",
                   total, routable, unreachable, longest, too_long, crossings,
                   nearest_unreachable, false_unreachable);
    return r;
}

// ------------------------------------------------------------- criterion 7

std::vector<BusRoute> scenario_bus_routes(const CityScene& scene, int n_routes,
                                          const std::vector<Person>& persons) {
    std::vector<BusRoute> routes;
    std::vector<const TransferPoint*> stops;
    for (const auto& [tid, tp] : scene.tps)
        if (tp.source == TransferPoint::Source::SegmentMidpoint) stops.push_back(&tp);
    for (int r = 0; r < n_routes; ++r) {
        BusRoute route;
        route.route_id = r;
        for (std::size_t i = r; i < stops.size() && route.stops.size() < 10;
             i += n_routes)
            route.stops.push_back(stops[i]->id);
        if (route.stops.size() < 2) continue;
        for (const Person& p : persons)
            if (p.occupation == Occupation::BusDriver && p.bus_route == r)
                route.driver = p.id;
        routes.push_back(std::move(route));
    }
    return routes;
}

struct ScenarioRun {
    std::uint64_t hash = 0;
    std::size_t snapshots = 0;
    std::size_t events = 0;
    int continuity_violations = -1;
    int pairing_violations = -1;
};

ScenarioRun run_scenario(bool audit) {
    const std::uint64_t seed = 42;
    CityScene scene = grid_scene(6, 6, seed);
    PopulationConfig pop_cfg;
    pop_cfg.bus_routes = 2;
    std::vector<Person> persons = generate_population(1000, scene.buildings, pop_cfg, seed);

    TaskConfig task_cfg;
    task_cfg.mean_times[Task::GoToWork] = 600.0;
    task_cfg.mean_times[Task::GoShopping] = 900.0;
    task_cfg.mean_times[Task::GoRecreation] = 1200.0;
    task_cfg.mean_times[Task::GoHome] = 3.0 * 3600.0;
    task_cfg.sigma = 300.0;
    std::vector<Trip> trips = assign_tasks(persons, task_cfg, seed);
    std::vector<Trip> returns;
    for (const Trip& t : trips) {
        Rng rng(mix_seed(seed ^ 0x9e3779b9ULL, static_cast<std::uint64_t>(t.person)));
        Trip back;
        back.person = t.person;
        back.task = Task::GoHome;
        back.origin = t.destination;
        back.destination = t.origin;
        back.start_time = std::max(t.start_time + 60.0,
                                   rng.normal(task_cfg.mean_times[Task::GoHome],
                                              task_cfg.sigma));
        returns.push_back(back);
    }
    trips.insert(trips.end(), returns.begin(), returns.end());

    std::vector<BusRoute> routes = scenario_bus_routes(scene, 2, persons);
    SimConfig cfg;
    cfg.dt = 0.5;
    cfg.duration = 3600.0;
    Simulation sim(scene, persons, trips, routes, cfg);
    sim.run();

    ScenarioRun out;
    out.snapshots = sim.snapshots().size();
    out.events = sim.events().size();
    std::uint64_t h = 1469598103934665603ULL;
    for (const Snapshot& snap : sim.snapshots()) {
        std::ostringstream os;
        write_timestep_xml(os, snap);
        h = fnv1a(os.str(), h);
    }
    {
        std::ostringstream os;
        write_events_xml(os, sim.events());
        h = fnv1a(os.str(), h);
    }
    out.hash = h;

    if (audit) {
        // inter-tick displacement never exceeds the active speed limit
        out.continuity_violations = 0;
        const auto& snaps = sim.snapshots();
        for (std::size_t i = 1; i < snaps.size(); ++i) {
            std::map<std::pair<char, std::int64_t>, const EntityRecord*> prev;
            for (const EntityRecord& e : snaps[i - 1].entities) prev[{e.type, e.id}] = &e;
            for (const EntityRecord& e : snaps[i].entities) {
                auto it = prev.find({e.type, e.id});
                if (it == prev.end()) continue;
                bool motorized = e.type == 'v' || e.vehicle >= 0;
                double vmax = motorized ? cfg.idm.v0 : 1.6;
                if (dist(e.pos, it->second->pos) > vmax * cfg.dt + 1e-6)
                    ++out.continuity_violations;
            }
        }
        // LEAVE/ENTER and BOARD/ALIGHT alternate per subject; a run truncated
        // mid-journey may end one deep, never negative or double-entered
        out.pairing_violations = 0;
        std::map<std::int64_t, int> outside, riding;
        for (const TruthEvent& e : sim.events()) {
            if (e.kind == "LEAVE_BUILDING") {
                if (outside[e.subject]++ != 0) ++out.pairing_violations;
            } else if (e.kind == "ENTER_BUILDING") {
                if (outside[e.subject]-- != 1) ++out.pairing_violations;
            } else if (e.kind == "BOARD_VEHICLE") {
                if (riding[e.subject]++ != 0) ++out.pairing_violations;
            } else if (e.kind == "ALIGHT_VEHICLE") {
                if (riding[e.subject]-- != 1) ++out.pairing_violations;
            }
        }
        for (const auto& [id, d] : outside)
            if (d < 0 || d > 1) ++out.pairing_violations;
        for (const auto& [id, d] : riding)
            if (d < 0 || d > 1) ++out.pairing_violations;
    }
    return out;
}

Result c7_scenario(double* first_run_s) {
    Result r;
    auto t0 = std::chrono::steady_clock::now();
    ScenarioRun a = run_scenario(true);
    *first_run_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count();
    ScenarioRun b = run_scenario(false);
    bool identical = a.hash == b.hash && a.snapshots == b.snapshots &&
                     a.events == b.events;
    r.ok = a.snapshots == 7200 && a.continuity_violations == 0 &&
           a.pairing_violations == 0 && identical && *first_run_s < 300.0;
    r.detail = fmt("1000 persons, 3600 s at dt 0.5: %zu snapshots, %zu events, "
                   "%d continuity violations, %d pairing violations, rerun %s "
                   "(serialization hash %016llx), first run %.1f s (limit 300)",
                   a.snapshots, a.events, a.continuity_violations,
                   a.pairing_violations, identical ? "byte-identical" : "DIFFERS",
                   static_cast<unsigned long long>(a.hash), *first_run_s);
    return r;
}

// ------------------------------------------------------------- criterion 8

Result c8_following() {
    Result r;
    const int n = 500;
    const double dt = 0.5;
    const int steps = 144000; // 20 h -> 500 vehicles x 20 h = 1e4 vehicle-hours
    RoadNetwork net;
    net.nodes[1] = {0, 0};
    net.nodes[2] = {800000.0, 0};
    RoadEdge e;
    e.id = 1;
    e.from = 1;
    e.to = 2;
    e.shape = {{0, 0}, {800000.0, 0}};
    net.edges[1] = e;

    TrafficWorld w;
    w.roads = &net;
    for (int i = 0; i < n; ++i) {
        VehicleState v;
        v.id = i;
        v.lane = {1, true};
        v.pos = i * 30.0;
        v.speed = 10.0;
        v.phase = VehiclePhase::Driving;
        w.vehicles[v.id] = v;
    }
    w.vehicles[n - 1].idm.v0 = 10.0; // speed-capped platoon leader

    double len = body_length(VehicleType::Car);
    double min_gap = 1e30;
    for (int s = 0; s < steps; ++s) {
        step_traffic(w, dt);
        const VehicleState* prev = nullptr;
        for (const auto& [id, v] : w.vehicles) {
            if (prev) min_gap = std::min(min_gap, v.pos - len - prev->pos);
            prev = &v;
        }
    }

    double want = idm_equilibrium_gap(10.0, IdmParams{});
    double sum = 0.0;
    int counted = 0;
    for (int i = 100; i < 400; ++i) {
        sum += w.vehicles[i + 1].pos - len - w.vehicles[i].pos;
        ++counted;
    }
    double mean_gap = sum / counted;
    r.ok = min_gap > 0.0 && std::abs(mean_gap - want) / want < 0.01;
    r.detail = fmt("%d vehicles x 20 h = 1e4 vehicle-hours: min gap %.3f m "
                   "(> 0 required); settled mid-platoon gap %.3f m vs closed-form "
                   "%.3f m (tol 1%%)",
                   n, min_gap, mean_gap, want);
    return r;
}

// ------------------------------------------------------------- criterion 9

// independent Moller-Trumbore oracle, no shared code with the library
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

Result c9_raycast() {
    Result r;
    Rng rng(1234);
    int disagreements = 0, hits = 0;
    for (int i = 0; i < 100000; ++i) {
        Vec3 a{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Vec3 b{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Vec3 c{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Ray3 ray{{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)},
                 random_unit(rng)};
        auto mine = ray_triangle(ray, make_tri(a, b, c));
        auto ref = moller_trumbore(ray, a, b, c);
        if (mine.has_value() != ref.has_value())
            ++disagreements;
        else if (mine && std::abs(*mine - *ref) > 1e-9)
            ++disagreements;
        if (mine) ++hits;
    }

    RayCaster rc = desk_city_caster();
    Rng rng2(55);
    std::vector<Ray3> rays;
    for (int i = 0; i < 10000; ++i) {
        Vec3 origin{rng2.uniform(400000 - 50, 400000 + 770),
                    rng2.uniform(5900000 - 50, 5900000 + 770), rng2.uniform(100, 600)};
        Vec3 dir = random_unit(rng2);
        if (dir.z > -0.1) dir.z = -0.1 - std::abs(dir.z);
        rays.push_back({origin, dir.normalized()});
    }
    struct Answer {
        bool hit;
        double d;
        std::size_t obj;
    };
    std::vector<Answer> with, without;
    rc.use_aabb = true;
    rc.reset_counters();
    for (const Ray3& ray : rays) {
        auto h = rc.first_hit(ray);
        with.push_back({h.has_value(), h ? h->distance : 0.0, h ? h->object : 0});
    }
    std::uint64_t culled = rc.triangle_tests;
    rc.use_aabb = false;
    rc.reset_counters();
    for (const Ray3& ray : rays) {
        auto h = rc.first_hit(ray);
        without.push_back({h.has_value(), h ? h->distance : 0.0, h ? h->object : 0});
    }
    std::uint64_t brute = rc.triangle_tests;
    int mismatches = 0;
    for (std::size_t i = 0; i < rays.size(); ++i)
        if (with[i].hit != without[i].hit || with[i].obj != without[i].obj ||
            std::abs(with[i].d - without[i].d) > 1e-9)
            ++mismatches;

    double ratio = culled ? static_cast<double>(brute) / culled : 0.0;
    r.ok = disagreements == 0 && hits > 100 && mismatches == 0 && ratio >= 5.0;
    r.detail = fmt("1e5 fuzzed pairs vs independent intersector: %d disagreements "
                   "(%d hits, tol 1e-9); AABB culling on 1e4 rays: %d changed "
                   "answers, triangle tests cut %.1fx (>= 5 required)",
                   disagreements, hits, mismatches, ratio);
    return r;
}

// ------------------------------------------------------------ criterion 10

Result c10_batching() {
    Result r;
    // fixed fixture: two frames alternating between two patches
    std::vector<RenderJob> naive = {
        {0, 1, 1, 0}, {0, 1, 2, 1}, {1, 1, 1, 0}, {1, 1, 2, 1}};
    int fixture_reset = swap_count(naive);
    int fixture_grouped = swap_count(build_batch(naive));
    if (fixture_reset != 3 || fixture_grouped != 1) r.ok = false;

    Rng rng(1);
    int worse = 0, equal_multi_patch = 0, equal = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int frames = 2 + static_cast<int>(rng.bounded(4));
        int cams = 2 + static_cast<int>(rng.bounded(6));
        int patches = 1 + static_cast<int>(rng.bounded(4));
        std::vector<RenderJob> batch;
        bool one_patch_per_frame = true;
        for (int f = 0; f < frames; ++f) {
            int first = -1;
            for (int c = 0; c < cams; ++c) {
                int p = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(patches)));
                if (first < 0) first = p;
                if (p != first) one_patch_per_frame = false;
                batch.push_back({f, 1, c + 1, p});
            }
        }
        int grouped = swap_count(build_batch(batch));
        int reset = swap_count(batch);
        if (grouped > reset) ++worse;
        if (grouped == reset) {
            ++equal;
            if (!one_patch_per_frame) ++equal_multi_patch;
        }
    }
    if (worse || equal_multi_patch || equal == 0) r.ok = false;
    r.detail = fmt("4-job fixture: %d swaps grouped vs %d per-frame (want 1 vs 3); "
                   "50 random batches: %d grouped worse than reset, %d equal counts "
                   "(%d of them despite a multi-patch frame; 0 required)",
                   fixture_grouped, fixture_reset, worse, equal, equal_multi_patch);
    return r;
}

// ------------------------------------------------------------ criterion 11

Result c11_mosaic() {
    Result r;
    CityScene scene = grid_scene(3, 3, 7);
    Vec2 center{400180.0, 5900180.0}; // middle of the 3x3 road grid
    RenderScene rs = build_render_scene(scene, nullptr, nullptr);
    ImagerSpec desk = argus_desk();
    PlatformPose rig;
    rig.position.altitude = 300.0;
    MosaicPlane plane = make_plane(desk);

    std::vector<WarpedImage> warps;
    for (int v = 1; v <= desk.n_v; ++v)
        for (int h = 1; h <= desk.n_h; ++h) {
            SubcameraPose pose = subcamera_pose(v, h, desk);
            Image frame = render_subcamera(rs, pose, rig, desk, center);
            warps.push_back(warp_to_mosaic(frame, pose, desk, plane));
        }

    std::array<std::uint8_t, 3> fill = {0, 0, 0};
    TileSet tiles = stitch_tiles(warps, plane, fill);
    Image via_tiles = concatenate(tiles, plane, fill);
    Image direct = compose_direct(warps, plane, fill);
    bool identical = images_equal(via_tiles, direct);

    // every multiply-covered pixel carries the angularly nearest camera
    const double kDeg = 3.14159265358979323846 / 180.0;
    int overlap = 0, wrong_winner = 0;
    for (int y = 0; y < plane.extent; ++y) {
        for (int x = 0; x < plane.extent; ++x) {
            auto [th, tv] = angles_from_plane({x + 0.5, y + 0.5}, plane);
            const WarpedImage* best = nullptr;
            double best_d = 0.0;
            int covers = 0;
            for (const WarpedImage& wi : warps) {
                int lx = x - wi.x0, ly = y - wi.y0;
                if (lx < 0 || lx >= wi.img.width || ly < 0 || ly >= wi.img.height)
                    continue;
                if (!wi.mask[static_cast<std::size_t>(ly) * wi.img.width + lx]) continue;
                ++covers;
                double dh = th - wi.pose.azimuth_deg * kDeg;
                double dv = tv - wi.pose.elevation_deg * kDeg;
                double d = dh * dh + dv * dv;
                if (!best || d < best_d) {
                    best = &wi;
                    best_d = d;
                }
            }
            if (covers < 2) continue;
            ++overlap;
            const std::uint8_t* want =
                best->img.at(x - best->x0, y - best->y0);
            if (std::memcmp(direct.at(x, y), want, 3) != 0) ++wrong_winner;
        }
    }
    r.ok = identical && overlap > 100 && wrong_winner == 0;
    r.detail = fmt("desk array over the 3x3 city: tiled route %s direct "
                   "composition; %d overlap pixels audited, %d not from the "
                   "nearest-boresight camera",
                   identical ? "pixel-identical to" : "DIFFERS from", overlap,
                   wrong_winner);
    return r;
}

// ------------------------------------------------------------ criterion 12

Result c12_infrared() {
    Result r;
    IrModel m = default_ir_model();
    Rng rng(99);
    Image frame(64, 48);
    for (auto& px : frame.px) px = static_cast<std::uint8_t>(rng.bounded(256));
    std::vector<double> near(64 * 48), far(64 * 48);
    for (std::size_t i = 0; i < near.size(); ++i) {
        near[i] = rng.uniform(50, 500);
        far[i] = rng.uniform(2000, 9000);
    }

    // disabled atmosphere: output independent of range, exactly
    m.kappa_per_km = 0.0;
    m.path_radiance = 0.0;
    GrayImage a = ir_transform(frame, near, m);
    GrayImage b = ir_transform(frame, far, m);
    bool identity = a.px == b.px;

    // infinite range: every pixel collapses to the path radiance
    IrModel haze = default_ir_model();
    haze.kappa_per_km = 0.1;
    haze.path_radiance = 0.3;
    std::vector<double> infinite(64 * 48, 1e9);
    GrayImage c = ir_transform(frame, infinite, haze);
    int adc_max = (1 << haze.adc_bits) - 1;
    long want = std::lround(0.3 * adc_max);
    int off_by = 0;
    for (std::uint16_t v : c.px)
        if (std::abs(static_cast<long>(v) - want) > 1) ++off_by;

    // pre-noise temperature is monotone over both palette families
    int non_monotone = 0;
    for (int v = 1; v < 256; ++v)
        if (ir_pixel_temperature(v, v, v, m) <
            ir_pixel_temperature(v - 1, v - 1, v - 1, m))
            ++non_monotone;
    for (int v = 42; v < 256; ++v)
        if (ir_pixel_temperature(static_cast<std::uint8_t>(v), 0,
                                 static_cast<std::uint8_t>(v), m) <
            ir_pixel_temperature(static_cast<std::uint8_t>(v - 1), 0,
                                 static_cast<std::uint8_t>(v - 1), m))
            ++non_monotone;

    r.ok = identity && off_by == 0 && non_monotone == 0;
    r.detail = fmt("disabled atmosphere %s across ranges; infinite range -> "
                   "path radiance ADC %ld +/-1 (%d pixels outside); %d monotonicity "
                   "breaks across the background and hot-palette ramps",
                   identity ? "exactly identical" : "DIFFERS", want, off_by,
                   non_monotone);
    return r;
}

// ------------------------------------------------------------ criterion 13

Result c13_geo() {
    Result r;
    // frozen from the independent high-precision projection (tools/ref/snyder_tm.py)
    const double ref_e = 507789.036857, ref_n = 5911271.636823;
    UtmPoint u = utm_forward({53.350530, -2.882987, 0.0}, 30);
    double de = std::abs(u.easting - ref_e);
    double dn = std::abs(u.northing - ref_n);

    double worst = 0.0;
    for (int ix = 0; ix <= 10; ++ix) {
        for (int iy = 0; iy <= 10; ++iy) {
            UtmPoint g{u.easting - 50000.0 + ix * 10000.0,
                       u.northing - 50000.0 + iy * 10000.0, 30, true};
            GeoPoint p = utm_inverse(g);
            UtmPoint v = utm_forward(p, 30);
            GeoPoint p2 = utm_inverse(v);
            worst = std::max(worst, std::abs(p2.latitude - p.latitude));
            worst = std::max(worst, std::abs(p2.longitude - p.longitude));
        }
    }
    r.ok = de < 0.01 && dn < 0.01 && worst < 1e-7;
    r.detail = fmt("reference point off by (%.4f, %.4f) m (tol 1 cm); worst "
                   "round-trip error %.2e deg over the 100 km grid (tol 1e-7)",
                   de, dn, worst);
    return r;
}

} // namespace

int main() {
    double scenario_first_run = 0.0;
    int failures = 0;
    auto report = [&](int id, const char* name, const Result& res, double elapsed,
                      double limit) {
        bool ok = res.ok && (limit <= 0.0 || elapsed < limit);
        if (!ok) ++failures;
        std::printf("criterion %2d: %s  %s — %s [%.2f s%s]\n", id, ok ? "PASS" : "FAIL",
                    name, res.detail.c_str(), elapsed,
                    limit > 0.0 ? fmt(", limit %.0f", limit).c_str() : "");
        std::fflush(stdout);
    };
    auto timed = [&](int id, const char* name, Result (*fn)(), double limit) {
        auto t0 = std::chrono::steady_clock::now();
        Result res = fn();
        double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report(id, name, res, s, limit);
    };

    timed(1, "array pointing offsets", c1_pointing, 1.0);
    timed(2, "frame byte accounting", c2_frame_bytes, 0.0);
    timed(3, "nadir coverage and ground sample", c3_coverage_gsd, 0.0);
    timed(4, "mosaic eyepoint and warp scale", c4_eyepoint, 0.0);
    timed(5, "bus-leg planner vs exhaustive search", c5_planner, 30.0);
    timed(6, "procedural city footpaths", c6_city, 60.0);
    {
        auto t0 = std::chrono::steady_clock::now();
        Result res = c7_scenario(&scenario_first_run);
        double total =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // the 300 s limit applies to one run; both runs are timed for context
        report(7, "full-scenario determinism and continuity", res, total, 0.0);
    }
    timed(8, "car-following safety and equilibrium", c8_following, 0.0);
    timed(9, "ray-triangle agreement and AABB culling", c9_raycast, 0.0);
    timed(10, "render batch patch grouping", c10_batching, 0.0);
    timed(11, "tiled mosaic equals direct composition", c11_mosaic, 0.0);
    timed(12, "infrared model identities", c12_infrared, 0.0);
    timed(13, "UTM round-trip and reference point", c13_geo, 0.0);

    std::printf("%d of 13 criteria passed\n", 13 - failures);
    return failures == 0 ? 0 : 1;
}
