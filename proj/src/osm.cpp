#include "wams/osm.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace pt = boost::property_tree;

namespace wams {

namespace {

RoadClass road_class_from(const std::string& highway) {
    if (highway == "motorway" || highway == "motorway_link" || highway == "trunk")
        return RoadClass::Motorway;
    if (highway == "primary" || highway == "primary_link") return RoadClass::Primary;
    if (highway == "secondary" || highway == "tertiary") return RoadClass::Secondary;
    if (highway == "residential" || highway == "living_street" || highway == "unclassified")
        return RoadClass::Residential;
    if (highway == "service") return RoadClass::Service;
    return RoadClass::Other;
}

bool is_path_class(const std::string& highway) {
    return highway == "footway" || highway == "path" || highway == "pedestrian" ||
           highway == "steps" || highway == "track";
}

BuildingClass building_class_from(const std::string& v) {
    if (v == "house" || v == "residential" || v == "apartments" || v == "detached" ||
        v == "terrace" || v == "semidetached_house" || v == "bungalow")
        return BuildingClass::Residential;
    if (v == "commercial" || v == "retail" || v == "office" || v == "shop" ||
        v == "supermarket" || v == "hotel")
        return BuildingClass::Commercial;
    if (v == "industrial" || v == "warehouse" || v == "factory")
        return BuildingClass::Industrial;
    if (v == "school" || v == "hospital" || v == "civic" || v == "public" ||
        v == "church" || v == "cathedral" || v == "university" || v == "government")
        return BuildingClass::Civic;
    return BuildingClass::Other;
}

struct RawWay {
    std::int64_t id = 0;
    std::vector<std::int64_t> nds;
    std::map<std::string, std::string> tags;
};

} // namespace

void detect_junctions(RoadNetwork& roads) {
    roads.junctions.clear();
    std::map<NodeId, std::vector<EdgeId>> incident;
    for (const auto& [id, e] : roads.edges) {
        incident[e.from].push_back(id);
        incident[e.to].push_back(id);
    }
    for (const auto& [nid, eids] : incident) {
        if (eids.size() < 3) continue;
        Junction j;
        j.node = nid;
        j.edges = eids;
        double hw = 0.0;
        for (EdgeId eid : eids) hw = std::max(hw, roads.edges.at(eid).half_width());
        j.radius = hw + 2.0;
        roads.junctions[nid] = j;
    }
}

void generate_sidewalks(const RoadNetwork& roads, PathNetwork& paths, const OsmConfig& cfg) {
    NodeId next_node = 1;
    EdgeId next_edge = 1;
    for (const auto& [nid, p] : paths.nodes) next_node = std::max(next_node, nid + 1);
    for (const auto& [eid, e] : paths.edges) next_edge = std::max(next_edge, eid + 1);

    struct EndPoint {
        NodeId path_node;
        Vec2 pos;
    };
    std::map<NodeId, std::vector<EndPoint>> at_road_node;

    for (const auto& [eid, e] : roads.edges) {
        if (!e.sidewalk) continue;
        double off = e.half_width() + cfg.sidewalk_margin;
        for (int side = 0; side < 2; ++side) {
            std::vector<Vec2> sw = offset_polyline(e.shape, side == 0 ? off : -off);
            PathEdge pe;
            pe.id = next_edge++;
            pe.from = next_node++;
            pe.to = next_node++;
            pe.shape = sw;
            pe.kind = PathKind::Sidewalk;
            pe.source_road = eid;
            pe.side = side == 0 ? 1 : -1;
            paths.nodes[pe.from] = sw.front();
            paths.nodes[pe.to] = sw.back();
            at_road_node[e.from].push_back({pe.from, sw.front()});
            at_road_node[e.to].push_back({pe.to, sw.back()});
            paths.edges[pe.id] = pe;
        }
    }

    // join sidewalk ends around every shared road node; these short
    // connectors double as pedestrian crossings at junctions
    for (const auto& [rnid, ends] : at_road_node) {
        if (ends.size() < 2) continue;
        Vec2 c = roads.nodes.at(rnid);
        std::vector<std::size_t> order(ends.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double aa = std::atan2(ends[a].pos.y - c.y, ends[a].pos.x - c.x);
            double ab = std::atan2(ends[b].pos.y - c.y, ends[b].pos.x - c.x);
            return aa < ab;
        });
        bool is_junction = roads.junctions.count(rnid) > 0;
        std::size_t n = order.size();
        for (std::size_t k = 0; k < (n == 2 ? 1 : n); ++k) {
            const EndPoint& a = ends[order[k]];
            const EndPoint& b = ends[order[(k + 1) % n]];
            if (dist(a.pos, b.pos) < 1e-6) continue;
            PathEdge pe;
            pe.id = next_edge++;
            pe.from = a.path_node;
            pe.to = b.path_node;
            pe.shape = {a.pos, b.pos};
            pe.kind = is_junction ? PathKind::Crossing : PathKind::Connector;
            if (is_junction) pe.crossing_junction = rnid;
            paths.edges[pe.id] = pe;
        }
    }
    paths.relabel_components();
}

OsmParseResult parse_osm(std::istream& xml, const OsmConfig& cfg) {
    // a blank document counts as empty input, not a parse error
    xml >> std::ws;
    if (xml.eof()) return {};

    pt::ptree tree;
    try {
        pt::read_xml(xml, tree);
    } catch (const pt::xml_parser_error& e) {
        throw OsmParseError("OSM parse error at line " + std::to_string(e.line()) +
                            ": " + e.message());
    }

    OsmParseResult out;
    auto osm = tree.get_child_optional("osm");
    if (!osm) {
        if (tree.empty()) return out; // empty document -> empty networks
        throw OsmParseError("not an OSM document (missing <osm> root)");
    }

    std::map<std::int64_t, GeoPoint> geo_nodes;
    std::vector<RawWay> ways;

    for (const auto& [name, child] : *osm) {
        if (name == "node") {
            std::int64_t id = child.get<std::int64_t>("<xmlattr>.id");
            GeoPoint g;
            g.latitude = child.get<double>("<xmlattr>.lat");
            g.longitude = child.get<double>("<xmlattr>.lon");
            geo_nodes[id] = g;
        } else if (name == "way") {
            RawWay w;
            w.id = child.get<std::int64_t>("<xmlattr>.id");
            for (const auto& [cn, cc] : child) {
                if (cn == "nd") {
                    w.nds.push_back(cc.get<std::int64_t>("<xmlattr>.ref"));
                } else if (cn == "tag") {
                    w.tags[cc.get<std::string>("<xmlattr>.k")] =
                        cc.get<std::string>("<xmlattr>.v");
                }
            }
            ways.push_back(std::move(w));
        }
    }
    if (geo_nodes.empty()) return out;

    // fixed zone from the scene centroid; cross-zone scenes rejected
    double lat_sum = 0.0, lon_sum = 0.0;
    for (const auto& [id, g] : geo_nodes) {
        lat_sum += g.latitude;
        lon_sum += g.longitude;
    }
    double lat_c = lat_sum / geo_nodes.size();
    double lon_c = lon_sum / geo_nodes.size();
    out.utm_zone = utm_zone_for(lon_c);
    out.north = lat_c >= 0.0;
    for (const auto& [id, g] : geo_nodes) {
        if (utm_zone_for(g.longitude) != out.utm_zone)
            throw OsmParseError("scene spans more than one UTM zone");
    }

    std::map<std::int64_t, Vec2> xy;
    for (const auto& [id, g] : geo_nodes) {
        UtmPoint u = utm_forward(g, out.utm_zone);
        xy[id] = {u.easting, u.northing};
    }

    // usage counts decide where highway ways split into graph edges
    std::map<std::int64_t, int> usage;
    for (const RawWay& w : ways) {
        if (!w.tags.count("highway")) continue;
        for (std::size_t i = 0; i < w.nds.size(); ++i) {
            usage[w.nds[i]] += (i == 0 || i + 1 == w.nds.size()) ? 2 : 1;
        }
    }

    EdgeId next_road_edge = 1;
    EdgeId next_path_edge = 1;
    auto missing_node = [&](const RawWay& w) {
        for (std::int64_t nd : w.nds)
            if (!xy.count(nd)) return true;
        return false;
    };

    for (const RawWay& w : ways) {
        auto hw_it = w.tags.find("highway");
        auto bld_it = w.tags.find("building");

        if (hw_it != w.tags.end()) {
            if (w.nds.size() < 2) {
                out.warnings.push_back("way " + std::to_string(w.id) + ": fewer than 2 nodes");
                continue;
            }
            if (missing_node(w)) {
                out.warnings.push_back("way " + std::to_string(w.id) +
                                       ": references missing node, rejected");
                continue;
            }
            bool is_path = is_path_class(hw_it->second);
            RoadClass rc = road_class_from(hw_it->second);

            // split at shared nodes
            std::vector<std::size_t> cuts{0};
            for (std::size_t i = 1; i + 1 < w.nds.size(); ++i)
                if (usage[w.nds[i]] >= 2) cuts.push_back(i);
            cuts.push_back(w.nds.size() - 1);

            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                std::vector<Vec2> shape;
                for (std::size_t i = cuts[c]; i <= cuts[c + 1]; ++i) {
                    Vec2 p = xy[w.nds[i]];
                    if (shape.empty() || dist(shape.back(), p) > 1e-9) shape.push_back(p);
                }
                if (shape.size() < 2) continue; // degenerate piece
                if (is_path) {
                    PathEdge pe;
                    pe.id = next_path_edge++;
                    pe.from = w.nds[cuts[c]];
                    pe.to = w.nds[cuts[c + 1]];
                    pe.shape = shape;
                    out.paths.nodes[pe.from] = shape.front();
                    out.paths.nodes[pe.to] = shape.back();
                    out.paths.edges[pe.id] = pe;
                } else {
                    RoadEdge re;
                    re.id = next_road_edge++;
                    re.from = w.nds[cuts[c]];
                    re.to = w.nds[cuts[c + 1]];
                    re.road_class = rc;
                    re.lane_width = cfg.lane_width;
                    auto lanes_it = w.tags.find("lanes");
                    re.lanes = lanes_it != w.tags.end()
                                   ? std::max(1, std::atoi(lanes_it->second.c_str()))
                                   : default_lanes(rc);
                    auto sw_it = w.tags.find("sidewalk");
                    re.sidewalk = sw_it != w.tags.end()
                                      ? sw_it->second != "no" && sw_it->second != "none"
                                      : cfg.sidewalk_classes.count(rc) > 0;
                    re.shape = shape;
                    out.roads.nodes[re.from] = shape.front();
                    out.roads.nodes[re.to] = shape.back();
                    out.roads.edges[re.id] = re;
                }
            }
        } else if (bld_it != w.tags.end()) {
            if (w.nds.size() < 4 || w.nds.front() != w.nds.back()) {
                out.warnings.push_back("way " + std::to_string(w.id) +
                                       ": building outline not closed, rejected");
                continue;
            }
            if (missing_node(w)) {
                out.warnings.push_back("way " + std::to_string(w.id) +
                                       ": references missing node, rejected");
                continue;
            }
            BuildingFootprint b;
            b.id = w.id;
            for (std::size_t i = 0; i + 1 < w.nds.size(); ++i) b.ring.push_back(xy[w.nds[i]]);
            if (signed_area(b.ring) < 0.0) std::reverse(b.ring.begin(), b.ring.end());
            if (signed_area(b.ring) <= 0.0) {
                out.warnings.push_back("way " + std::to_string(w.id) +
                                       ": degenerate building ring, rejected");
                continue;
            }
            b.building_class = building_class_from(bld_it->second);
            out.buildings.push_back(std::move(b));
        }
    }

    detect_junctions(out.roads);
    if (cfg.generate_sidewalks) generate_sidewalks(out.roads, out.paths, cfg);
    out.paths.relabel_components();
    return out;
}

OsmParseResult parse_osm_string(const std::string& xml, const OsmConfig& cfg) {
    std::istringstream ss(xml);
    return parse_osm(ss, cfg);
}

} // namespace wams
