#include "wams/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wams {

Tri make_tri(const Vec3& a, const Vec3& b, const Vec3& c) {
    Tri t;
    t.a = a;
    t.u = b - a;
    t.v = c - a;
    t.n = t.u.cross(t.v);
    t.uu = t.u.dot(t.u);
    t.uv = t.u.dot(t.v);
    t.vv = t.v.dot(t.v);
    t.denom = t.uv * t.uv - t.uu * t.vv;
    t.degenerate = t.n.dot(t.n) < 1e-18 || std::abs(t.denom) < 1e-18;
    return t;
}

std::optional<double> ray_triangle(const Ray3& r, const Tri& t) {
    if (t.degenerate) return std::nullopt;
    double nd = t.n.dot(r.dir);
    if (std::abs(nd) < 1e-14) return std::nullopt; // parallel to the plane
    double dist = t.n.dot(t.a - r.origin) / nd;
    if (dist < 1e-12) return std::nullopt; // behind the origin
    Vec3 w = r.origin + r.dir * dist - t.a;
    double wu = w.dot(t.u);
    double wv = w.dot(t.v);
    double s = (t.uv * wv - t.vv * wu) / t.denom;
    if (s < -1e-12 || s > 1.0 + 1e-12) return std::nullopt;
    double tt = (t.uv * wu - t.uu * wv) / t.denom;
    if (tt < -1e-12 || s + tt > 1.0 + 1e-12) return std::nullopt;
    return dist;
}

std::optional<std::pair<double, double>> aabb_interval(const Ray3& r, const Aabb3& box) {
    double t0 = 0.0, t1 = 1e300;
    const double o[3] = {r.origin.x, r.origin.y, r.origin.z};
    const double d[3] = {r.dir.x, r.dir.y, r.dir.z};
    const double lo[3] = {box.lo.x, box.lo.y, box.lo.z};
    const double hi[3] = {box.hi.x, box.hi.y, box.hi.z};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(d[i]) < 1e-15) {
            if (o[i] < lo[i] || o[i] > hi[i]) return std::nullopt;
            continue;
        }
        double inv = 1.0 / d[i];
        double a = (lo[i] - o[i]) * inv;
        double b = (hi[i] - o[i]) * inv;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
        if (t0 > t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

namespace {

void grow(Aabb3& box, const Vec3& p) {
    box.lo.x = std::min(box.lo.x, p.x);
    box.lo.y = std::min(box.lo.y, p.y);
    box.lo.z = std::min(box.lo.z, p.z);
    box.hi.x = std::max(box.hi.x, p.x);
    box.hi.y = std::max(box.hi.y, p.y);
    box.hi.z = std::max(box.hi.z, p.z);
}

void finish_box(MeshObject& m) {
    m.box.lo = {1e300, 1e300, 1e300};
    m.box.hi = {-1e300, -1e300, -1e300};
    for (const Tri& t : m.tris) {
        grow(m.box, t.a);
        grow(m.box, t.a + t.u);
        grow(m.box, t.a + t.v);
    }
}

} // namespace

MeshObject mesh_prism(const std::vector<Vec2>& ring, double base_z, double height,
                      std::int64_t id) {
    MeshObject m;
    m.id = id;
    std::size_t n = ring.size();
    double top = base_z + height;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = ring[i];
        const Vec2& q = ring[(i + 1) % n];
        Vec3 a{p.x, p.y, base_z}, b{q.x, q.y, base_z};
        Vec3 c{q.x, q.y, top}, d{p.x, p.y, top};
        m.tris.push_back(make_tri(a, b, c));
        m.tris.push_back(make_tri(a, c, d));
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        m.tris.push_back(make_tri({ring[0].x, ring[0].y, top},
                                  {ring[i].x, ring[i].y, top},
                                  {ring[i + 1].x, ring[i + 1].y, top}));
        m.tris.push_back(make_tri({ring[0].x, ring[0].y, base_z},
                                  {ring[i + 1].x, ring[i + 1].y, base_z},
                                  {ring[i].x, ring[i].y, base_z}));
    }
    finish_box(m);
    return m;
}

MeshObject mesh_terrain_patch(const Vec2& lo, const Vec2& hi, double elevation,
                              std::int64_t id) {
    MeshObject m;
    m.id = id;
    Vec3 a{lo.x, lo.y, elevation}, b{hi.x, lo.y, elevation};
    Vec3 c{hi.x, hi.y, elevation}, d{lo.x, hi.y, elevation};
    m.tris.push_back(make_tri(a, b, c));
    m.tris.push_back(make_tri(a, c, d));
    finish_box(m);
    return m;
}

std::optional<RayHit> RayCaster::first_hit(const Ray3& r, double max_dist) const {
    std::optional<RayHit> best;
    double best_d = max_dist;
    for (std::size_t oi = 0; oi < objects.size(); ++oi) {
        const MeshObject& m = objects[oi];
        if (use_aabb) {
            ++aabb_tests;
            auto iv = aabb_interval(r, m.box);
            if (!iv || iv->first > best_d) continue;
        }
        for (const Tri& t : m.tris) {
            ++triangle_tests;
            auto d = ray_triangle(r, t);
            if (d && *d < best_d) {
                best_d = *d;
                best = RayHit{*d, oi};
            }
        }
    }
    return best;
}

const double* EntityBounds::for_record(const EntityRecord& rec) const {
    if (rec.type == 'p') return person;
    if (rec.state == "bus") return bus;
    return car;
}

VisibilityResult entity_visible(const CameraView& cam, const Vec3& center,
                                const double extent[3], const RayCaster& world,
                                const VisibilityConfig& cfg) {
    VisibilityResult res;
    Vec3 to = center - cam.position;
    double range = to.norm();
    if (range < 1e-9) return res;
    Vec3 dir = to * (1.0 / range);
    double half = cam.fov_deg * 3.14159265358979 / 180.0 / 2.0;
    res.in_frustum = std::acos(std::clamp(dir.dot(cam.boresight), -1.0, 1.0)) <= half;
    double max_extent = std::max({extent[0], extent[1], extent[2]});
    res.pixel_extent = max_extent / range / cam.delta_theta;
    if (!res.in_frustum) return res;

    double hz = extent[2] / 2.0;
    Vec3 samples[5] = {
        center,
        center + Vec3{-extent[0] / 2, -extent[1] / 2, hz},
        center + Vec3{extent[0] / 2, -extent[1] / 2, hz},
        center + Vec3{extent[0] / 2, extent[1] / 2, hz},
        center + Vec3{-extent[0] / 2, extent[1] / 2, hz},
    };
    int clear = 0;
    for (const Vec3& s : samples) {
        Vec3 d = s - cam.position;
        double sd = d.norm();
        Ray3 ray{cam.position, d * (1.0 / sd)};
        auto hit = world.first_hit(ray, sd - 1e-6);
        if (!hit) ++clear;
    }
    res.unoccluded_fraction = clear / 5.0;
    res.visible = res.unoccluded_fraction >= cfg.visible_fraction - 1e-12 &&
                  res.pixel_extent >= cfg.min_pixels;
    return res;
}

std::map<std::string, int> count_visible(const CameraView& cam, const Snapshot& snap,
                                         const RayCaster& world,
                                         const EntityBounds& bounds,
                                         const VisibilityConfig& cfg) {
    std::map<std::string, int> totals;
    for (const EntityRecord& rec : snap.entities) {
        const double* e = bounds.for_record(rec);
        Vec3 center{rec.pos.x, rec.pos.y, e[2] / 2.0};
        auto res = entity_visible(cam, center, e, world, cfg);
        if (res.visible) ++totals[rec.type == 'p' ? "person" : rec.state];
    }
    return totals;
}

namespace {

std::optional<std::string> attr(const std::string& line, const std::string& key) {
    std::string probe = key + "=\"";
    auto p = line.find(probe);
    if (p == std::string::npos) return std::nullopt;
    p += probe.size();
    auto q = line.find('"', p);
    if (q == std::string::npos) return std::nullopt;
    return line.substr(p, q - p);
}

[[noreturn]] void malformed(int line_no, const std::string& what) {
    throw std::runtime_error("truth log line " + std::to_string(line_no) + ": " + what);
}

double attr_num(const std::string& line, const std::string& key, int line_no) {
    auto v = attr(line, key);
    if (!v) malformed(line_no, "missing attribute " + key);
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        malformed(line_no, "bad number in attribute " + key);
    }
}

} // namespace

Snapshot parse_timestep_xml(const std::string& text) {
    Snapshot snap;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    bool opened = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find("<timestep") != std::string::npos) {
            snap.time = attr_num(line, "t", line_no);
            opened = true;
        } else if (line.find("<vehicle") != std::string::npos) {
            if (!opened) malformed(line_no, "entity before <timestep>");
            EntityRecord r;
            r.type = 'v';
            r.id = static_cast<std::int64_t>(attr_num(line, "id", line_no));
            r.pos = {attr_num(line, "x", line_no), attr_num(line, "y", line_no)};
            r.heading = attr_num(line, "heading", line_no);
            r.speed = attr_num(line, "speed", line_no);
            auto ty = attr(line, "type");
            if (!ty) malformed(line_no, "missing attribute type");
            r.state = *ty;
            snap.entities.push_back(std::move(r));
        } else if (line.find("<person") != std::string::npos) {
            if (!opened) malformed(line_no, "entity before <timestep>");
            EntityRecord r;
            r.type = 'p';
            r.id = static_cast<std::int64_t>(attr_num(line, "id", line_no));
            r.pos = {attr_num(line, "x", line_no), attr_num(line, "y", line_no)};
            auto st = attr(line, "state");
            if (!st) malformed(line_no, "missing attribute state");
            r.state = *st;
            if (auto veh = attr(line, "vehicle"))
                r.vehicle = static_cast<std::int64_t>(std::stod(*veh));
            snap.entities.push_back(std::move(r));
        }
    }
    if (!opened) malformed(line_no, "no <timestep> element");
    return snap;
}

std::vector<TruthEvent> parse_events_xml(const std::string& text) {
    std::vector<TruthEvent> events;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find("<event ") == std::string::npos) continue;
        TruthEvent e;
        e.time = attr_num(line, "t", line_no);
        auto kind = attr(line, "kind");
        if (!kind) malformed(line_no, "missing attribute kind");
        e.kind = *kind;
        e.subject = static_cast<std::int64_t>(attr_num(line, "subject", line_no));
        e.pos = {attr_num(line, "x", line_no), attr_num(line, "y", line_no)};
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<TruthEvent> query_events(const std::vector<TruthEvent>& events,
                                     const TruthFilter& f) {
    std::vector<TruthEvent> out;
    for (const TruthEvent& e : events) {
        if (e.time < f.t_begin || e.time > f.t_end) continue;
        if (f.kind && e.kind != *f.kind) continue;
        if (f.id && e.subject != *f.id) continue;
        if (f.region) {
            const auto& [lo, hi] = *f.region;
            if (e.pos.x < lo.x || e.pos.x > hi.x || e.pos.y < lo.y || e.pos.y > hi.y)
                continue;
        }
        out.push_back(e);
    }
    return out;
}

std::vector<std::vector<TrackPoint>> query_tracks(const std::vector<Snapshot>& snaps,
                                                  const TruthFilter& f) {
    std::map<std::pair<char, std::int64_t>, std::vector<TrackPoint>> open;
    std::vector<std::pair<std::pair<char, std::int64_t>, std::vector<TrackPoint>>> done;
    for (const Snapshot& snap : snaps) {
        if (snap.time < f.t_begin || snap.time > f.t_end) continue;
        std::map<std::pair<char, std::int64_t>, const EntityRecord*> present;
        for (const EntityRecord& r : snap.entities) {
            if (f.id && r.id != *f.id) continue;
            if (f.type && r.type != *f.type) continue;
            if (f.region) {
                const auto& [lo, hi] = *f.region;
                if (r.pos.x < lo.x || r.pos.x > hi.x || r.pos.y < lo.y || r.pos.y > hi.y)
                    continue;
            }
            present[{r.type, r.id}] = &r;
        }
        // close segments for entities no longer present
        for (auto it = open.begin(); it != open.end();) {
            if (!present.count(it->first)) {
                done.push_back({it->first, std::move(it->second)});
                it = open.erase(it);
            } else {
                ++it;
            }
        }
        for (const auto& [key, rec] : present)
            open[key].push_back({snap.time, rec->pos, rec->state});
    }
    for (auto& [key, seg] : open) done.push_back({key, std::move(seg)});
    std::sort(done.begin(), done.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.front().time < b.second.front().time;
    });
    std::vector<std::vector<TrackPoint>> out;
    for (auto& [key, seg] : done) out.push_back(std::move(seg));
    return out;
}

} // namespace wams
