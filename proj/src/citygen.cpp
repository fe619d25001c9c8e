#include "wams/citygen.hpp"

#include "wams/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wams {

namespace {

constexpr double kInf = std::numeric_limits<double>::max();

std::optional<double> ray_segment(const Vec2& o, const Vec2& d, double max_len,
                                  const Vec2& a, const Vec2& b) {
    auto hit = segment_intersect(o, o + d * max_len, a, b);
    if (!hit) return std::nullopt;
    return hit->first * max_len;
}

std::optional<double> ray_circle(const Vec2& o, const Vec2& d, double max_len,
                                 const Vec2& c, double r) {
    Vec2 oc = o - c;
    double b = oc.dot(d);
    double q = oc.dot(oc) - r * r;
    if (q <= 0.0) return 0.0; // origin inside the disc
    double disc = b * b - q;
    if (disc < 0.0) return std::nullopt;
    double t = -b - std::sqrt(disc);
    if (t < 0.0 || t > max_len) return std::nullopt;
    return t;
}

} // namespace

double extrude_building(const BuildingFootprint& fp, const CitygenConfig& cfg,
                        std::uint64_t scenario_seed) {
    double area = fp.area();
    if (area <= 0.0) throw std::invalid_argument("zero-area building polygon");
    const HeightRange& hr = cfg.heights.at(fp.building_class);
    double f = std::clamp(area / hr.area_ref, 0.0, 1.0);
    double base = hr.min_h + (hr.max_h - hr.min_h) * f;
    Rng rng(mix_seed(scenario_seed, static_cast<std::uint64_t>(fp.id)));
    double u = rng.uniform(-cfg.height_jitter, cfg.height_jitter);
    return base * (1.0 + u);
}

std::optional<FootpathResult> generate_footpath(const BuildingFootprint& b,
                                                const std::vector<BuildingFootprint>& all,
                                                const PathNetwork& paths,
                                                const RoadNetwork& roads,
                                                const CitygenConfig& cfg) {
    const double L = cfg.max_probe_length;
    double best_len = kInf;
    FootpathResult best;
    bool found = false;

    std::size_t n = b.ring.size();
    for (std::size_t wi = 0; wi < n; ++wi) {
        const Vec2& w0 = b.ring[wi];
        const Vec2& w1 = b.ring[(wi + 1) % n];
        double wall_len = dist(w0, w1);
        if (wall_len < cfg.doorway_width) continue;

        Vec2 mid = (w0 + w1) * 0.5;
        Vec2 dir = (w1 - w0).normalized().perp_right(); // outward for a CCW ring
        Vec2 o = mid + dir * 1e-6;

        // nearest blocking wall (own other walls and every other building)
        double wall_t = kInf;
        for (const BuildingFootprint& fb : all) {
            std::size_t m = fb.ring.size();
            for (std::size_t k = 0; k < m; ++k) {
                if (fb.id == b.id && k == wi) continue;
                if (auto t = ray_segment(o, dir, L, fb.ring[k], fb.ring[(k + 1) % m]))
                    wall_t = std::min(wall_t, *t);
            }
        }

        // nearest junction disc
        double junc_t = kInf;
        for (const auto& [nid, j] : roads.junctions) {
            if (auto t = ray_circle(o, dir, L, roads.nodes.at(nid), j.radius))
                junc_t = std::min(junc_t, *t);
        }

        // nearest path-network hit
        double path_t = kInf;
        EdgeId path_edge = 0;
        for (const auto& [eid, pe] : paths.edges) {
            for (std::size_t k = 0; k + 1 < pe.shape.size(); ++k) {
                if (auto t = ray_segment(o, dir, L, pe.shape[k], pe.shape[k + 1])) {
                    if (*t < path_t) {
                        path_t = *t;
                        path_edge = eid;
                    }
                }
            }
        }

        if (path_t == kInf) continue;              // exceeds 30 m without reaching a path
        if (wall_t < path_t) continue;             // blocked by a wall first
        if (junc_t < path_t) continue;             // junction hits are failures
        if (path_t >= best_len) continue;          // strict less: lower wall index wins ties

        FootpathResult r;
        r.doorway = mid;
        r.gateway = mid + dir * path_t;
        r.footpath = {r.doorway, r.gateway};
        r.gateway_path_edge = path_edge;

        // extend past the gateway looking for the road lane
        double road_t = kInf;
        EdgeId road_edge = 0;
        std::size_t road_seg = 0;
        double ext = path_t + cfg.road_search_beyond;
        for (const auto& [eid, re] : roads.edges) {
            for (std::size_t k = 0; k + 1 < re.shape.size(); ++k) {
                if (auto t = ray_segment(o, dir, ext, re.shape[k], re.shape[k + 1])) {
                    if (*t > path_t && *t < road_t) {
                        road_t = *t;
                        road_edge = eid;
                        road_seg = k;
                    }
                }
            }
        }
        if (road_t < kInf) {
            Vec2 crossing = o + dir * road_t;
            if (!roads.in_junction(crossing)) {
                const RoadEdge& re = roads.edges.at(road_edge);
                Vec2 rd = (re.shape[road_seg + 1] - re.shape[road_seg]).normalized();
                // lane on the building's side of the carriageway
                double side = (o - crossing).dot(rd.perp_right()) >= 0.0 ? 1.0 : -1.0;
                double lane_off = re.half_width() - re.lane_width * 0.5;
                r.stop_point = crossing + rd.perp_right() * (side * lane_off);
                r.stop_edge = road_edge;
                r.stop_arc = nearest_on_polyline(crossing, re.shape).arc;
            }
        }

        best = r;
        best_len = path_t;
        found = true;
    }

    if (!found) return std::nullopt;
    return best;
}

std::vector<TransferPoint> generate_transfer_points(const RoadNetwork& roads,
                                                    const PathNetwork& paths,
                                                    double sidewalk_offset_margin) {
    std::vector<TransferPoint> out;
    std::int64_t next_id = 1;
    for (const auto& [eid, e] : roads.edges) {
        if (!e.sidewalk) continue;
        double arc = 0.0;
        for (std::size_t k = 0; k + 1 < e.shape.size(); ++k) {
            double seg_len = dist(e.shape[k], e.shape[k + 1]);
            Vec2 mid = (e.shape[k] + e.shape[k + 1]) * 0.5;
            double mid_arc = arc + seg_len * 0.5;
            arc += seg_len;
            if (roads.in_junction(mid)) continue; // no stopping mid-junction

            Vec2 rd = (e.shape[k + 1] - e.shape[k]).normalized();
            TransferPoint tp;
            tp.id = next_id++;
            tp.source = TransferPoint::Source::SegmentMidpoint;
            tp.road_edge = eid;
            tp.road_arc = mid_arc;
            tp.forward = true; // right-hand side of the edge direction
            tp.wait_point = mid + rd.perp_right() * (e.half_width() + sidewalk_offset_margin);
            tp.stop_point = mid + rd.perp_right() * (e.half_width() - e.lane_width * 0.5);

            // component of the sidewalk this wait point stands on
            for (const auto& [pid, pe] : paths.edges) {
                if (pe.kind == PathKind::Sidewalk && pe.source_road == eid && pe.side == 1) {
                    tp.path_component = paths.component.count(pe.from)
                                            ? paths.component.at(pe.from)
                                            : -1;
                    break;
                }
            }
            out.push_back(tp);
        }
    }
    return out;
}

const TransferPoint& link_gateway(const Vec2& gateway,
                                  const std::vector<TransferPoint>& tps) {
    if (tps.empty()) throw std::invalid_argument("no transfer points to link");
    const TransferPoint* best = &tps.front();
    double bd = dist(gateway, best->wait_point);
    for (const TransferPoint& tp : tps) {
        double d = dist(gateway, tp.wait_point);
        if (d < bd - 1e-12 || (std::abs(d - bd) <= 1e-12 && tp.id < best->id)) {
            bd = d;
            best = &tp;
        }
    }
    return *best;
}

CityBuildResult build_city(const std::vector<BuildingFootprint>& footprints,
                           const PathNetwork& paths, const RoadNetwork& roads,
                           const CitygenConfig& cfg, std::uint64_t seed) {
    CityBuildResult out;
    out.transfer_points = generate_transfer_points(roads, paths);
    std::int64_t next_tp = out.transfer_points.empty() ? 1 : out.transfer_points.back().id + 1;

    for (const BuildingFootprint& fp : footprints) {
        Building b;
        b.footprint = fp;
        b.height = extrude_building(fp, cfg, seed);

        auto fr = generate_footpath(fp, footprints, paths, roads, cfg);
        if (!fr) {
            out.log.push_back("building " + std::to_string(fp.id) + ": unreachable (no probe)");
            out.buildings.push_back(std::move(b));
            continue;
        }
        b.doorway = fr->doorway;
        b.gateway = fr->gateway;
        b.footpath = fr->footpath;
        int comp = paths.component.count(paths.edges.at(fr->gateway_path_edge).from)
                       ? paths.component.at(paths.edges.at(fr->gateway_path_edge).from)
                       : -1;

        if (fr->stop_point) {
            // direct roadside access: the probe's own transfer point
            TransferPoint tp;
            tp.id = next_tp++;
            tp.source = TransferPoint::Source::BuildingProbe;
            tp.wait_point = fr->gateway;
            tp.stop_point = *fr->stop_point;
            tp.road_edge = fr->stop_edge;
            tp.road_arc = fr->stop_arc;
            const RoadEdge& re = roads.edges.at(fr->stop_edge);
            PolylineHit gh = nearest_on_polyline(fr->gateway, re.shape);
            Vec2 rd = re.shape[gh.segment + 1] - re.shape[gh.segment];
            tp.forward = (fr->gateway - gh.point).dot(rd.normalized().perp_right()) >= 0.0;
            tp.path_component = comp;
            b.stop_point = fr->stop_point;
            b.transfer_id = tp.id;
            out.transfer_points.push_back(tp);
            b.routable = true;
        } else {
            // remote transfer point in the gateway's walkable component
            std::vector<TransferPoint> candidates;
            for (const TransferPoint& tp : out.transfer_points)
                if (tp.path_component == comp) candidates.push_back(tp);
            if (candidates.empty()) {
                out.log.push_back("building " + std::to_string(fp.id) +
                                  ": unreachable (no transfer point in walk component)");
                out.buildings.push_back(std::move(b));
                continue;
            }
            b.transfer_id = link_gateway(fr->gateway, candidates).id;
            b.routable = true;
        }
        out.buildings.push_back(std::move(b));
    }
    return out;
}

} // namespace wams
