#include "wams/scene_xml.hpp"

#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wams {

namespace {

const char* kind_name(PathKind k) {
    switch (k) {
    case PathKind::Footway: return "footway";
    case PathKind::Sidewalk: return "sidewalk";
    case PathKind::Crossing: return "crossing";
    case PathKind::Connector: return "connector";
    }
    return "footway";
}

std::optional<PathKind> kind_from(const std::string& s) {
    if (s == "footway") return PathKind::Footway;
    if (s == "sidewalk") return PathKind::Sidewalk;
    if (s == "crossing") return PathKind::Crossing;
    if (s == "connector") return PathKind::Connector;
    return std::nullopt;
}

std::optional<RoadClass> road_class_from(const std::string& s) {
    for (RoadClass c : {RoadClass::Motorway, RoadClass::Primary, RoadClass::Secondary,
                        RoadClass::Residential, RoadClass::Service, RoadClass::Other})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

std::optional<BuildingClass> building_class_from(const std::string& s) {
    for (BuildingClass c : {BuildingClass::Residential, BuildingClass::Commercial,
                            BuildingClass::Industrial, BuildingClass::Civic,
                            BuildingClass::Other})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_pts(std::ostream& os, const std::vector<Vec2>& pts, const char* indent) {
    for (const Vec2& p : pts)
        os << indent << "<pt x=\"" << num(p.x) << "\" y=\"" << num(p.y) << "\"/>\n";
}

std::optional<std::string> attr(const std::string& line, const std::string& key) {
    std::string probe = " " + key + "=\"";
    auto p = line.find(probe);
    if (p == std::string::npos) return std::nullopt;
    p += probe.size();
    auto q = line.find('"', p);
    if (q == std::string::npos) return std::nullopt;
    return line.substr(p, q - p);
}

[[noreturn]] void malformed(int line_no, const std::string& what) {
    throw std::runtime_error("scene file line " + std::to_string(line_no) + ": " + what);
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

std::int64_t attr_id(const std::string& line, const std::string& key, int line_no) {
    return static_cast<std::int64_t>(attr_num(line, key, line_no));
}

std::string attr_str(const std::string& line, const std::string& key, int line_no) {
    auto v = attr(line, key);
    if (!v) malformed(line_no, "missing attribute " + key);
    return *v;
}

} // namespace

void write_scene_xml(std::ostream& os, const CityScene& scene,
                     const std::string& config_hash) {
    os << "<scene utm_zone=\"" << scene.utm_zone << "\" north=\"" << (scene.north ? 1 : 0)
       << "\"";
    if (!config_hash.empty()) os << " config=\"" << config_hash << "\"";
    os << ">\n";

    os << " <roads>\n";
    for (const auto& [nid, p] : scene.roads.nodes)
        os << "  <rnode id=\"" << nid << "\" x=\"" << num(p.x) << "\" y=\"" << num(p.y)
           << "\"/>\n";
    for (const auto& [eid, e] : scene.roads.edges) {
        os << "  <redge id=\"" << eid << "\" from=\"" << e.from << "\" to=\"" << e.to
           << "\" lanes=\"" << e.lanes << "\" lane_width=\"" << num(e.lane_width)
           << "\" class=\"" << to_string(e.road_class) << "\" sidewalk=\""
           << (e.sidewalk ? 1 : 0) << "\">\n";
        write_pts(os, e.shape, "   ");
        os << "  </redge>\n";
    }
    for (const auto& [nid, j] : scene.roads.junctions) {
        os << "  <junction node=\"" << nid << "\" radius=\"" << num(j.radius) << "\">\n";
        for (EdgeId e : j.edges) os << "   <incident edge=\"" << e << "\"/>\n";
        os << "  </junction>\n";
    }
    os << " </roads>\n";

    os << " <paths>\n";
    for (const auto& [nid, p] : scene.paths.nodes)
        os << "  <pnode id=\"" << nid << "\" x=\"" << num(p.x) << "\" y=\"" << num(p.y)
           << "\"/>\n";
    for (const auto& [eid, e] : scene.paths.edges) {
        os << "  <pedge id=\"" << eid << "\" from=\"" << e.from << "\" to=\"" << e.to
           << "\" kind=\"" << kind_name(e.kind) << "\"";
        if (e.crossing_junction) os << " crossing=\"" << *e.crossing_junction << "\"";
        if (e.source_road != 0)
            os << " source_road=\"" << e.source_road << "\" side=\"" << e.side << "\"";
        os << ">\n";
        write_pts(os, e.shape, "   ");
        os << "  </pedge>\n";
    }
    os << " </paths>\n";

    os << " <buildings>\n";
    for (const Building& b : scene.buildings) {
        os << "  <building id=\"" << b.footprint.id << "\" class=\""
           << to_string(b.footprint.building_class) << "\" height=\"" << num(b.height)
           << "\" routable=\"" << (b.routable ? 1 : 0) << "\" door_x=\"" << num(b.doorway.x)
           << "\" door_y=\"" << num(b.doorway.y) << "\" gate_x=\"" << num(b.gateway.x)
           << "\" gate_y=\"" << num(b.gateway.y) << "\"";
        if (b.stop_point)
            os << " stop_x=\"" << num(b.stop_point->x) << "\" stop_y=\""
               << num(b.stop_point->y) << "\"";
        if (b.transfer_id) os << " transfer=\"" << *b.transfer_id << "\"";
        os << ">\n   <ring>\n";
        write_pts(os, b.footprint.ring, "    ");
        os << "   </ring>\n   <footpath>\n";
        write_pts(os, b.footpath, "    ");
        os << "   </footpath>\n  </building>\n";
    }
    os << " </buildings>\n";

    os << " <transfers>\n";
    for (const auto& [tid, tp] : scene.tps) {
        os << "  <tp id=\"" << tp.id << "\" wait_x=\"" << num(tp.wait_point.x)
           << "\" wait_y=\"" << num(tp.wait_point.y) << "\" stop_x=\"" << num(tp.stop_point.x)
           << "\" stop_y=\"" << num(tp.stop_point.y) << "\" source=\""
           << (tp.source == TransferPoint::Source::BuildingProbe ? "probe" : "midpoint")
           << "\" road_edge=\"" << tp.road_edge << "\" arc=\"" << num(tp.road_arc)
           << "\" forward=\"" << (tp.forward ? 1 : 0) << "\" component=\""
           << tp.path_component << "\"/>\n";
    }
    os << " </transfers>\n</scene>\n";
}

CityScene parse_scene_xml(const std::string& text, std::string* config_hash) {
    CityScene scene;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    bool opened = false;

    std::vector<Vec2>* pts = nullptr;      // active <pt> sink
    RoadEdge* redge = nullptr;             // inside <redge>
    PathEdge* pedge = nullptr;             // inside <pedge>
    Junction* junction = nullptr;          // inside <junction>
    Building* building = nullptr;          // inside <building>

    while (std::getline(is, line)) {
        ++line_no;
        if (line.find("<scene") != std::string::npos) {
            scene.utm_zone = static_cast<int>(attr_num(line, "utm_zone", line_no));
            scene.north = attr_num(line, "north", line_no) != 0;
            if (config_hash) *config_hash = attr(line, "config").value_or("");
            opened = true;
        } else if (line.find("<rnode") != std::string::npos) {
            if (!opened) malformed(line_no, "element before <scene>");
            scene.roads.nodes[attr_id(line, "id", line_no)] = {
                attr_num(line, "x", line_no), attr_num(line, "y", line_no)};
        } else if (line.find("<redge") != std::string::npos) {
            RoadEdge e;
            e.id = attr_id(line, "id", line_no);
            e.from = attr_id(line, "from", line_no);
            e.to = attr_id(line, "to", line_no);
            e.lanes = static_cast<int>(attr_num(line, "lanes", line_no));
            e.lane_width = attr_num(line, "lane_width", line_no);
            auto rc = road_class_from(attr_str(line, "class", line_no));
            if (!rc) malformed(line_no, "unknown road class");
            e.road_class = *rc;
            e.sidewalk = attr_num(line, "sidewalk", line_no) != 0;
            redge = &(scene.roads.edges[e.id] = e);
            pts = &redge->shape;
        } else if (line.find("</redge>") != std::string::npos) {
            redge = nullptr;
            pts = nullptr;
        } else if (line.find("<junction") != std::string::npos) {
            Junction j;
            j.node = attr_id(line, "node", line_no);
            j.radius = attr_num(line, "radius", line_no);
            junction = &(scene.roads.junctions[j.node] = j);
        } else if (line.find("<incident") != std::string::npos) {
            if (!junction) malformed(line_no, "<incident> outside <junction>");
            junction->edges.push_back(attr_id(line, "edge", line_no));
        } else if (line.find("</junction>") != std::string::npos) {
            junction = nullptr;
        } else if (line.find("<pnode") != std::string::npos) {
            scene.paths.nodes[attr_id(line, "id", line_no)] = {
                attr_num(line, "x", line_no), attr_num(line, "y", line_no)};
        } else if (line.find("<pedge") != std::string::npos) {
            PathEdge e;
            e.id = attr_id(line, "id", line_no);
            e.from = attr_id(line, "from", line_no);
            e.to = attr_id(line, "to", line_no);
            auto k = kind_from(attr_str(line, "kind", line_no));
            if (!k) malformed(line_no, "unknown path kind");
            e.kind = *k;
            if (attr(line, "crossing")) e.crossing_junction = attr_id(line, "crossing", line_no);
            if (attr(line, "source_road")) {
                e.source_road = attr_id(line, "source_road", line_no);
                e.side = static_cast<int>(attr_num(line, "side", line_no));
            }
            pedge = &(scene.paths.edges[e.id] = e);
            pts = &pedge->shape;
        } else if (line.find("</pedge>") != std::string::npos) {
            pedge = nullptr;
            pts = nullptr;
        } else if (line.find("<building ") != std::string::npos) {
            Building b;
            b.footprint.id = attr_id(line, "id", line_no);
            auto bc = building_class_from(attr_str(line, "class", line_no));
            if (!bc) malformed(line_no, "unknown building class");
            b.footprint.building_class = *bc;
            b.height = attr_num(line, "height", line_no);
            b.routable = attr_num(line, "routable", line_no) != 0;
            b.doorway = {attr_num(line, "door_x", line_no), attr_num(line, "door_y", line_no)};
            b.gateway = {attr_num(line, "gate_x", line_no), attr_num(line, "gate_y", line_no)};
            if (attr(line, "stop_x"))
                b.stop_point = Vec2{attr_num(line, "stop_x", line_no),
                                    attr_num(line, "stop_y", line_no)};
            if (attr(line, "transfer")) b.transfer_id = attr_id(line, "transfer", line_no);
            scene.buildings.push_back(std::move(b));
            building = &scene.buildings.back();
        } else if (line.find("<ring>") != std::string::npos) {
            if (!building) malformed(line_no, "<ring> outside <building>");
            pts = &building->footprint.ring;
        } else if (line.find("</ring>") != std::string::npos) {
            pts = nullptr;
        } else if (line.find("<footpath>") != std::string::npos) {
            if (!building) malformed(line_no, "<footpath> outside <building>");
            pts = &building->footpath;
        } else if (line.find("</footpath>") != std::string::npos) {
            pts = nullptr;
        } else if (line.find("</building>") != std::string::npos) {
            building = nullptr;
        } else if (line.find("<tp ") != std::string::npos) {
            TransferPoint tp;
            tp.id = attr_id(line, "id", line_no);
            tp.wait_point = {attr_num(line, "wait_x", line_no),
                             attr_num(line, "wait_y", line_no)};
            tp.stop_point = {attr_num(line, "stop_x", line_no),
                             attr_num(line, "stop_y", line_no)};
            tp.source = attr_str(line, "source", line_no) == "probe"
                            ? TransferPoint::Source::BuildingProbe
                            : TransferPoint::Source::SegmentMidpoint;
            tp.road_edge = attr_id(line, "road_edge", line_no);
            tp.road_arc = attr_num(line, "arc", line_no);
            tp.forward = attr_num(line, "forward", line_no) != 0;
            tp.path_component = static_cast<int>(attr_num(line, "component", line_no));
            scene.tps[tp.id] = tp;
        } else if (line.find("<pt ") != std::string::npos) {
            if (!pts) malformed(line_no, "<pt> outside a point list");
            pts->push_back({attr_num(line, "x", line_no), attr_num(line, "y", line_no)});
        }
    }
    if (!opened) malformed(line_no, "no <scene> element");
    scene.paths.relabel_components();
    return scene;
}

} // namespace wams
