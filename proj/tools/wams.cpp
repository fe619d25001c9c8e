// Pipeline orchestrator: generate -> simulate -> plan -> render -> stitch,
// plus truth-log query and scenario report. File formats are documented in
// docs/file-formats.md; configuration keys in docs/configuration.md.
#include <CLI11.hpp>

#include "wams/imaging.hpp"
#include "wams/osm.hpp"
#include "wams/population.hpp"
#include "wams/procgen.hpp"
#include "wams/rng.hpp"
#include "wams/scene_xml.hpp"
#include "wams/sensor.hpp"
#include "wams/sim.hpp"
#include "wams/visibility.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace wams;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitInvariant = 4;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail_config(const std::string& msg) { throw CliError{kExitConfig, msg}; }
[[noreturn]] void fail_missing(const std::string& artifact, const std::string& command) {
    throw CliError{kExitMissing,
                   "missing artifact " + artifact + "; run `wams " + command + "` first"};
}
[[noreturn]] void fail_invariant(const std::string& msg) {
    throw CliError{kExitInvariant, msg};
}

// ------------------------------------------------------------- configuration

struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string& k) const { return kv.count(k) != 0; }
    std::string str(const std::string& k, const std::string& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
    double num(const std::string& k, double dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        try {
            std::size_t used = 0;
            double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            fail_config("config key '" + k + "' is not a number: " + it->second);
        }
    }
    long integer(const std::string& k, long dflt) const {
        double v = num(k, static_cast<double>(dflt));
        long i = static_cast<long>(v);
        if (static_cast<double>(i) != v)
            fail_config("config key '" + k + "' must be an integer");
        return i;
    }
};

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

void apply_pair(Config& cfg, const std::string& spec, const std::string& where) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
        fail_config(where + ": expected key=value, got '" + spec + "'");
    std::string key = trim(spec.substr(0, eq));
    std::string value = trim(spec.substr(eq + 1));
    if (key.empty()) fail_config(where + ": empty key in '" + spec + "'");
    cfg.kv[key] = value;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    Config cfg;
    if (!path.empty()) {
        std::ifstream is(path);
        if (!is) fail_config("cannot open config file: " + path);
        std::string line;
        int n = 0;
        while (std::getline(is, line)) {
            ++n;
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            apply_pair(cfg, line, path + ":" + std::to_string(n));
        }
    }
    for (const std::string& o : overrides) apply_pair(cfg, o, "--set");
    if (cfg.num("duration", 3600.0) <= 0.0) fail_config("duration must be > 0");
    if (cfg.num("dt", 0.5) <= 0.0) fail_config("dt must be > 0");
    return cfg;
}

std::string config_hash(const Config& cfg) {
    std::string canon;
    for (const auto& [k, v] : cfg.kv) canon += k + "=" + v + "\n";
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

fs::path out_dir(const Config& cfg) { return fs::path(cfg.str("out", "out")); }

void note_provenance(const Config& cfg, const std::string& stage) {
    fs::create_directories(out_dir(cfg));
    std::ofstream os(out_dir(cfg) / "provenance.txt", std::ios::app);
    os << stage << ' ' << config_hash(cfg) << '\n';
}

std::string slurp(const fs::path& path, const std::string& producer) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail_missing(path.string(), producer);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// ------------------------------------------------------------ shared loaders

ImagerSpec imager_from(const Config& cfg) {
    std::string name = cfg.str("imager", "argus-desk");
    ImagerSpec spec;
    if (name == "argus-default") spec = argus_default();
    else if (name == "clif") spec = clif_preset();
    else if (name == "argus-desk") spec = argus_desk();
    else if (name == "custom") spec = ImagerSpec{};
    else fail_config("unknown imager '" + name + "'");
    if (cfg.has("fov_deg")) spec.fov_deg = cfg.num("fov_deg", spec.fov_deg);
    if (cfg.has("delta_theta")) spec.delta_theta = cfg.num("delta_theta", spec.delta_theta);
    if (cfg.has("ps_h")) spec.ps_h = static_cast<int>(cfg.integer("ps_h", spec.ps_h));
    if (cfg.has("ps_v")) spec.ps_v = static_cast<int>(cfg.integer("ps_v", spec.ps_v));
    if (cfg.has("array_h")) spec.n_h = static_cast<int>(cfg.integer("array_h", spec.n_h));
    if (cfg.has("array_v")) spec.n_v = static_cast<int>(cfg.integer("array_v", spec.n_v));
    if (name == "custom") spec.n_cameras = spec.n_h * spec.n_v;
    if (spec.delta_theta <= 0.0 || spec.fov_deg <= 0.0 || spec.ps_h <= 0 || spec.ps_v <= 0)
        fail_config("imager spec values must be positive");
    return spec;
}

CityScene load_scene(const Config& cfg) {
    return parse_scene_xml(slurp(out_dir(cfg) / "scene.xml", "generate"));
}

Vec2 scene_center(const CityScene& s) {
    Vec2 lo{1e30, 1e30}, hi{-1e30, -1e30};
    auto grow = [&](const Vec2& p) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    };
    for (const auto& [nid, p] : s.roads.nodes) grow(p);
    for (const Building& b : s.buildings)
        for (const Vec2& p : b.footprint.ring) grow(p);
    if (lo.x > hi.x) return {};
    return (lo + hi) * 0.5;
}

std::string ts_filename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ts_%08d.xml", index);
    return buf;
}

PlatformPose rig_from(const Config& cfg, const ImagerSpec& spec) {
    PlatformPose rig;
    rig.position.altitude = cfg.num("altitude", spec.fov_deg < 59.0 ? 300.0 : spec.z);
    rig.heading = cfg.num("heading", 0.0);
    rig.pitch = cfg.num("pitch", 0.0);
    rig.bank = cfg.num("bank", 0.0);
    return rig;
}

int snapshot_stride(const Config& cfg, const ImagerSpec& spec) {
    double dt = cfg.num("dt", 0.5);
    double f_store = cfg.num("f_store", spec.f_store);
    if (f_store <= 0.0) fail_config("f_store must be > 0");
    return std::max(1, static_cast<int>(std::lround(1.0 / (f_store * dt))));
}

// ------------------------------------------------------------------ generate

int cmd_generate(const Config& cfg) {
    std::string preset = cfg.str("preset", "grid-small");
    std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));

    CityScene scene;
    if (preset == "grid-small") {
        GridCityConfig gc;
        gc.rows = static_cast<int>(cfg.integer("rows", 6));
        gc.cols = static_cast<int>(cfg.integer("cols", 6));
        if (gc.rows < 1 || gc.cols < 1) fail_config("rows/cols must be >= 1");
        GridCity city = generate_grid_city(gc, seed);
        auto built = build_city(city.buildings, city.paths, city.roads, {}, seed);
        scene.roads = std::move(city.roads);
        scene.paths = std::move(city.paths);
        scene.buildings = std::move(built.buildings);
        for (auto& tp : built.transfer_points) scene.tps[tp.id] = tp;
        scene.utm_zone = city.utm_zone;
        scene.north = city.north;
        for (const std::string& w : built.log) std::cerr << "generate: " << w << '\n';
    } else if (preset == "osm") {
        std::string path = cfg.str("osm", "");
        if (path.empty()) fail_config("preset=osm requires the osm=<path> key");
        std::ifstream is(path);
        if (!is) fail_missing(path, "generate (provide the OSM input file)");
        OsmParseResult parsed;
        try {
            parsed = parse_osm(is);
        } catch (const OsmParseError& e) {
            fail_config(std::string("OSM parse failed: ") + e.what());
        }
        auto built = build_city(parsed.buildings, parsed.paths, parsed.roads, {}, seed);
        scene.roads = std::move(parsed.roads);
        scene.paths = std::move(parsed.paths);
        scene.buildings = std::move(built.buildings);
        for (auto& tp : built.transfer_points) scene.tps[tp.id] = tp;
        scene.utm_zone = parsed.utm_zone == 0 ? 30 : parsed.utm_zone;
        scene.north = parsed.north;
        for (const std::string& w : parsed.warnings) std::cerr << "generate: " << w << '\n';
    } else {
        fail_config("unknown preset '" + preset + "' (grid-small | osm)");
    }

    fs::create_directories(out_dir(cfg));
    std::ofstream os(out_dir(cfg) / "scene.xml", std::ios::binary);
    write_scene_xml(os, scene, config_hash(cfg));
    if (!os) fail_invariant("failed writing scene.xml");
    note_provenance(cfg, "generate");
    std::cout << "generate: " << scene.buildings.size() << " buildings, "
              << scene.roads.edges.size() << " road edges, " << scene.tps.size()
              << " transfer points -> " << (out_dir(cfg) / "scene.xml").string() << '\n';
    return 0;
}

// ------------------------------------------------------------------ simulate

std::vector<BusRoute> make_bus_routes(const CityScene& scene, int n_routes,
                                      const std::vector<Person>& persons) {
    std::vector<BusRoute> routes;
    if (n_routes <= 0) return routes;
    std::vector<const TransferPoint*> stops;
    for (const auto& [tid, tp] : scene.tps)
        if (tp.source == TransferPoint::Source::SegmentMidpoint) stops.push_back(&tp);
    if (stops.size() < 2) return routes;

    for (int r = 0; r < n_routes; ++r) {
        BusRoute route;
        route.route_id = r;
        // every n_routes-th stop, staggered per route, at most ten per loop
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

int cmd_simulate(const Config& cfg) {
    CityScene scene = load_scene(cfg);
    std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer(("seed"), 1));

    PopulationConfig pop_cfg;
    pop_cfg.bus_routes = static_cast<int>(cfg.integer("bus_routes", 2));
    pop_cfg.cohabit_fraction = cfg.num("cohabit_fraction", pop_cfg.cohabit_fraction);
    pop_cfg.vehicle_fraction = cfg.num("vehicle_fraction", pop_cfg.vehicle_fraction);
    std::size_t n = static_cast<std::size_t>(cfg.integer("population", 1000));
    long routable = std::count_if(scene.buildings.begin(), scene.buildings.end(),
                                  [](const Building& b) { return b.routable; });
    if (n > 0 && routable == 0)
        fail_invariant("scene has no routable buildings to settle the population");
    std::vector<Person> persons = generate_population(n, scene.buildings, pop_cfg, seed);

    TaskConfig task_cfg;
    task_cfg.proportions[Task::GoToWork] = cfg.num("prop_work", 0.5);
    task_cfg.proportions[Task::GoShopping] = cfg.num("prop_shop", 0.2);
    task_cfg.proportions[Task::GoRecreation] = cfg.num("prop_rec", 0.2);
    task_cfg.mean_times[Task::GoToWork] = cfg.num("mean_work", 600.0);
    task_cfg.mean_times[Task::GoShopping] = cfg.num("mean_shop", 900.0);
    task_cfg.mean_times[Task::GoRecreation] = cfg.num("mean_rec", 1200.0);
    task_cfg.mean_times[Task::GoHome] = cfg.num("mean_home", 3.0 * 3600.0);
    task_cfg.sigma = cfg.num("task_sigma", 300.0);
    std::vector<Trip> trips = assign_tasks(persons, task_cfg, seed);
    // homeward return trips, drawn around the shared go-home mean
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

    std::vector<BusRoute> routes = make_bus_routes(scene, pop_cfg.bus_routes, persons);

    SimConfig sim_cfg;
    sim_cfg.dt = cfg.num("dt", 0.5);
    sim_cfg.duration = cfg.num("duration", 3600.0);
    Simulation sim(scene, persons, trips, routes, sim_cfg);
    sim.run();

    fs::path truth = out_dir(cfg) / "truth";
    fs::create_directories(truth);
    int index = 0;
    for (const Snapshot& snap : sim.snapshots()) {
        std::ofstream os(truth / ts_filename(index++), std::ios::binary);
        write_timestep_xml(os, snap);
    }
    {
        std::ofstream os(truth / "events.xml", std::ios::binary);
        write_events_xml(os, sim.events());
    }
    note_provenance(cfg, "simulate");
    std::cout << "simulate: " << sim.snapshots().size() << " timesteps, "
              << sim.events().size() << " events, " << sim.completed_trips()
              << " completed trips, " << sim.aborted_journeys() << " aborted\n";
    return 0;
}

// ---------------------------------------------------------------------- plan

int cmd_plan(const Config& cfg) {
    CityScene scene = load_scene(cfg);
    ImagerSpec spec = imager_from(cfg);
    PlatformPose rig = rig_from(cfg, spec);
    Vec2 center = scene_center(scene);

    PatchLayout layout;
    layout.polygon_m = cfg.num("polygon_m", layout.polygon_m);
    layout.patches_x = static_cast<int>(cfg.integer("patches_x", 4));
    layout.patches_y = static_cast<int>(cfg.integer("patches_y", 4));
    double span_x = (layout.stride * (layout.patches_x - 1) + layout.patch_polys) *
                    layout.polygon_m;
    double span_y = (layout.stride * (layout.patches_y - 1) + layout.patch_polys) *
                    layout.polygon_m;
    layout.origin = center - Vec2{span_x / 2.0, span_y / 2.0};

    int frames = static_cast<int>(cfg.integer("frames", 1));
    if (frames < 1) fail_config("frames must be >= 1");
    std::vector<RenderJob> jobs;
    try {
        jobs = plan_batch(frames, spec, rig, layout, center);
    } catch (const std::runtime_error& e) {
        fail_invariant(std::string("plan: ") + e.what());
    }
    std::ofstream os(out_dir(cfg) / "jobs.txt", std::ios::binary);
    os << job_list_to_string(jobs);
    note_provenance(cfg, "plan");
    std::cout << "plan: " << jobs.size() << " jobs over " << frames << " frames, "
              << swap_count(jobs) << " patch swaps\n";
    return 0;
}

// -------------------------------------------------------------------- render

int cmd_render(const Config& cfg) {
    CityScene scene = load_scene(cfg);
    auto jobs = job_list_from_string(slurp(out_dir(cfg) / "jobs.txt", "plan"));
    if (jobs.empty()) fail_invariant("render: job list is empty");
    ImagerSpec spec = imager_from(cfg);
    PlatformPose rig = rig_from(cfg, spec);
    // boresight ground point: scene center unless overridden
    Vec2 center = scene_center(scene);
    if (cfg.has("ground_x")) center = {cfg.num("ground_x", 0.0), cfg.num("ground_y", 0.0)};

    double half = rig.position.altitude * std::tan(spec.fov_deg * 3.14159265358979 / 360.0);
    double margin = std::max(200.0, half) + 100.0;
    GroundTexture tex = render_ground_texture(scene.roads, center - Vec2{margin, margin},
                                              center + Vec2{margin, margin},
                                              cfg.num("texture_m_per_px", 0.8));

    int stride = snapshot_stride(cfg, spec);
    fs::path frames_dir = out_dir(cfg) / "frames";
    fs::create_directories(frames_dir);
    fs::path truth = out_dir(cfg) / "truth";

    int rendered = 0;
    int cached_frame = -1;
    Snapshot snap;
    RenderScene rs;
    for (const RenderJob& j : jobs) {
        if (j.frame != cached_frame) {
            snap = parse_timestep_xml(
                slurp(truth / ts_filename(j.frame * stride), "simulate"));
            rs = build_render_scene(scene, &snap, &tex);
            cached_frame = j.frame;
        }
        Image img = render_subcamera(rs, subcamera_pose(j.v, j.h, spec), rig, spec, center);
        write_tiff((frames_dir / frame_filename(j.frame, j.v, j.h)).string(), img);
        ++rendered;
    }
    note_provenance(cfg, "render");
    std::cout << "render: " << rendered << " frames -> " << frames_dir.string() << '\n';
    return 0;
}

// -------------------------------------------------------------------- stitch

int cmd_stitch(const Config& cfg) {
    auto jobs = job_list_from_string(slurp(out_dir(cfg) / "jobs.txt", "plan"));
    if (jobs.empty()) fail_invariant("stitch: job list is empty");
    ImagerSpec spec = imager_from(cfg);
    MosaicPlane plane = make_plane(spec, cfg.has("plane_r")
                                             ? std::optional<double>(cfg.num("plane_r", 0.0))
                                             : std::nullopt);

    std::map<int, std::vector<RenderJob>> by_frame;
    for (const RenderJob& j : jobs) by_frame[j.frame].push_back(j);

    fs::path frames_dir = out_dir(cfg) / "frames";
    fs::path tiles_dir = out_dir(cfg) / "tiles";
    fs::path mosaic_dir = out_dir(cfg) / "mosaic";
    fs::create_directories(tiles_dir);
    fs::create_directories(mosaic_dir);

    for (const auto& [frame, frame_jobs] : by_frame) {
        std::vector<WarpedImage> warps;
        for (const RenderJob& j : frame_jobs) {
            fs::path p = frames_dir / frame_filename(j.frame, j.v, j.h);
            if (!fs::exists(p)) fail_missing(p.string(), "render");
            warps.push_back(warp_to_mosaic(read_tiff(p.string()),
                                           subcamera_pose(j.v, j.h, spec), spec, plane));
        }
        TileSet ts = stitch_tiles(warps, plane);
        for (const auto& [rc, tile] : ts.tiles)
            write_tiff((tiles_dir / tile_filename(frame, rc.first, rc.second)).string(),
                       tile);
        char name[32];
        std::snprintf(name, sizeof name, "mosaic_%06d.tif", frame);
        write_tiff((mosaic_dir / name).string(), concatenate(ts, plane));
        std::cout << "stitch: frame " << frame << ": " << ts.tiles.size() << " tiles, "
                  << ts.holes.size() << " holes\n";
    }
    note_provenance(cfg, "stitch");
    return 0;
}

// --------------------------------------------------------------------- query

struct QueryFlags {
    std::string what = "events"; // events | tracks
    std::int64_t id = -1;
    std::string type; // p | v
    std::string kind;
    double t0 = -1e300, t1 = 1e300;
    std::vector<double> region; // x0 y0 x1 y1
    std::string output;         // empty = stdout
};

TruthFilter to_filter(const QueryFlags& q) {
    TruthFilter f;
    if (q.id >= 0) f.id = q.id;
    if (!q.type.empty()) {
        if (q.type != "p" && q.type != "v") fail_config("--type must be p or v");
        f.type = q.type[0];
    }
    if (!q.kind.empty()) f.kind = q.kind;
    f.t_begin = q.t0;
    f.t_end = q.t1;
    if (!q.region.empty()) {
        if (q.region.size() != 4) fail_config("--region needs x0 y0 x1 y1");
        f.region = {{q.region[0], q.region[1]}, {q.region[2], q.region[3]}};
    }
    return f;
}

int cmd_query(const Config& cfg, const QueryFlags& q) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!q.output.empty()) {
        file.open(q.output, std::ios::binary);
        if (!file) fail_config("cannot open output file: " + q.output);
        os = &file;
    }
    fs::path truth = out_dir(cfg) / "truth";

    if (q.what == "events") {
        auto events = parse_events_xml(slurp(truth / "events.xml", "simulate"));
        auto hits = query_events(events, to_filter(q));
        *os << "t,kind,subject,x,y\n";
        char buf[160];
        for (const TruthEvent& e : hits) {
            std::snprintf(buf, sizeof buf, "%.3f,%s,%lld,%.3f,%.3f\n", e.time,
                          e.kind.c_str(), static_cast<long long>(e.subject), e.pos.x,
                          e.pos.y);
            *os << buf;
        }
        std::cerr << "query: " << hits.size() << " events\n";
        return 0;
    }
    if (q.what == "tracks") {
        std::vector<Snapshot> snaps;
        for (int i = 0;; ++i) {
            fs::path p = truth / ts_filename(i);
            if (!fs::exists(p)) break;
            snaps.push_back(parse_timestep_xml(slurp(p, "simulate")));
        }
        if (snaps.empty()) fail_missing((truth / ts_filename(0)).string(), "simulate");
        auto tracks = query_tracks(snaps, to_filter(q));
        *os << "<tracks>\n";
        char buf[160];
        for (const auto& track : tracks) {
            *os << " <track>\n";
            for (const TrackPoint& p : track) {
                std::snprintf(buf, sizeof buf,
                              "  <pt t=\"%.3f\" x=\"%.3f\" y=\"%.3f\" state=\"%s\"/>\n",
                              p.time, p.pos.x, p.pos.y, p.state.c_str());
                *os << buf;
            }
            *os << " </track>\n";
        }
        *os << "</tracks>\n";
        std::cerr << "query: " << tracks.size() << " tracks\n";
        return 0;
    }
    fail_config("--what must be events or tracks");
}

// -------------------------------------------------------------------- report

int cmd_report(const Config& cfg) {
    CityScene scene = load_scene(cfg);
    fs::path truth = out_dir(cfg) / "truth";
    auto events = parse_events_xml(slurp(truth / "events.xml", "simulate"));

    std::map<std::string, long> by_kind;
    for (const TruthEvent& e : events) ++by_kind[e.kind];
    long board = by_kind["BOARD_VEHICLE"], alight = by_kind["ALIGHT_VEHICLE"];
    long leave = by_kind["LEAVE_BUILDING"], enter = by_kind["ENTER_BUILDING"];
    if (alight > board)
        fail_invariant("truth log has more alight than board events");
    if (enter > leave) fail_invariant("truth log has more enter than leave events");

    long timesteps = 0;
    std::set<std::int64_t> persons_seen, vehicles_seen;
    for (int i = 0;; ++i) {
        fs::path p = truth / ts_filename(i);
        if (!fs::exists(p)) break;
        Snapshot snap = parse_timestep_xml(slurp(p, "simulate"));
        for (const EntityRecord& r : snap.entities)
            (r.type == 'p' ? persons_seen : vehicles_seen).insert(r.id);
        ++timesteps;
    }

    std::cout << "scene: " << scene.buildings.size() << " buildings ("
              << std::count_if(scene.buildings.begin(), scene.buildings.end(),
                               [](const Building& b) { return b.routable; })
              << " routable), " << scene.roads.edges.size() << " road edges, "
              << scene.paths.edges.size() << " path edges, " << scene.tps.size()
              << " transfer points\n";
    std::cout << "truth: " << timesteps << " timesteps, " << persons_seen.size()
              << " persons outdoors, " << vehicles_seen.size() << " vehicles\n";
    std::cout << "events: " << events.size() << " total";
    for (const auto& [k, v] : by_kind) std::cout << ", " << k << "=" << v;
    std::cout << '\n';
    std::cout << "pairing: leave=" << leave << " enter=" << enter << " board=" << board
              << " alight=" << alight << '\n';

    fs::path jobs_path = out_dir(cfg) / "jobs.txt";
    if (fs::exists(jobs_path)) {
        auto jobs = job_list_from_string(slurp(jobs_path, "plan"));
        std::vector<RenderJob> by_frame = jobs;
        std::stable_sort(by_frame.begin(), by_frame.end(),
                         [](const RenderJob& a, const RenderJob& b) {
                             return a.frame < b.frame;
                         });
        std::cout << "jobs: " << jobs.size() << ", grouped swaps " << swap_count(jobs)
                  << ", per-frame swaps " << swap_count(by_frame) << '\n';
    }

    ImagerSpec spec = imager_from(cfg);
    double gib = static_cast<double>(frame_bytes(spec)) / (1024.0 * 1024.0 * 1024.0);
    char buf[96];
    std::snprintf(buf, sizeof buf, "imager: %d cameras, %.3f GiB per uncompressed frame\n",
                  spec.active_cameras(), gib);
    std::cout << buf;
    std::cout << "config: " << config_hash(cfg) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wams: synthetic wide-area aerial surveillance pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "key=value configuration file");
    app.add_option("-s,--set", overrides, "override a config key (key=value)");

    auto* generate = app.add_subcommand("generate", "build the scene file");
    auto* simulate = app.add_subcommand("simulate", "run the trip simulation");
    auto* plan = app.add_subcommand("plan", "schedule render jobs by texture patch");
    auto* render = app.add_subcommand("render", "raster subcamera frames");
    auto* stitch = app.add_subcommand("stitch", "warp frames into mosaic tiles");
    auto* query = app.add_subcommand("query", "filter the truth logs");
    auto* report = app.add_subcommand("report", "scenario summary and audits");
    for (auto* sub : {generate, simulate, plan, render, stitch, query, report})
        sub->fallthrough(); // global -c/-s may follow the subcommand

    QueryFlags qf;
    query->add_option("--what", qf.what, "events | tracks");
    query->add_option("--id", qf.id, "entity id filter");
    query->add_option("--type", qf.type, "entity type filter (p | v)");
    query->add_option("--kind", qf.kind, "event kind filter");
    query->add_option("--t0", qf.t0, "window start, s");
    query->add_option("--t1", qf.t1, "window end, s");
    query->add_option("--region", qf.region, "x0 y0 x1 y1")->expected(4);
    query->add_option("-o,--output", qf.output, "write results to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        Config cfg = load_config(config_path, overrides);
        if (generate->parsed()) return cmd_generate(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (plan->parsed()) return cmd_plan(cfg);
        if (render->parsed()) return cmd_render(cfg);
        if (stitch->parsed()) return cmd_stitch(cfg);
        if (query->parsed()) return cmd_query(cfg, qf);
        if (report->parsed()) return cmd_report(cfg);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    }
    return 0;
}
