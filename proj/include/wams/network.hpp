#pragma once

#include "wams/geom.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wams {

using NodeId = std::int64_t;
using EdgeId = std::int64_t;

enum class RoadClass { Motorway, Primary, Secondary, Residential, Service, Other };
enum class BuildingClass { Residential, Commercial, Industrial, Civic, Other };

const char* to_string(RoadClass c);
const char* to_string(BuildingClass c);

struct RoadEdge {
    EdgeId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    int lanes = 1;            // per direction
    double lane_width = 3.2;  // m
    RoadClass road_class = RoadClass::Residential;
    bool sidewalk = true;
    std::vector<Vec2> shape;  // polyline from 'from' to 'to', UTM meters

    double length() const { return polyline_length(shape); }
    /// Half-width of the carriageway (both directions).
    double half_width() const { return lanes * lane_width; }
};

struct Junction {
    NodeId node = 0;
    std::vector<EdgeId> edges; // incident road edges
    double radius = 6.0;       // disc approximation, m
};

struct RoadNetwork {
    std::map<NodeId, Vec2> nodes;
    std::map<EdgeId, RoadEdge> edges;
    std::map<NodeId, Junction> junctions;

    bool in_junction(const Vec2& p) const {
        for (const auto& [nid, j] : junctions) {
            if (dist(p, nodes.at(nid)) <= j.radius) return true;
        }
        return false;
    }
};

enum class PathKind { Footway, Sidewalk, Crossing, Connector };

struct PathEdge {
    EdgeId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    std::vector<Vec2> shape;
    PathKind kind = PathKind::Footway;
    /// Set when this segment is a pedestrian crossing through a junction.
    std::optional<NodeId> crossing_junction;
    /// For autogenerated sidewalks: the road edge this runs beside and the
    /// side of travel (+1 right of the edge direction, -1 left).
    EdgeId source_road = 0;
    int side = 0;

    double length() const { return polyline_length(shape); }
};

struct PathNetwork {
    std::map<NodeId, Vec2> nodes;
    std::map<EdgeId, PathEdge> edges;
    std::map<NodeId, int> component; // connected-component label per node

    void relabel_components();
    int component_of_edge(EdgeId e) const { return component.at(edges.at(e).from); }
};

struct BuildingFootprint {
    std::int64_t id = 0;
    std::vector<Vec2> ring; // CCW, not closed (last != first)
    BuildingClass building_class = BuildingClass::Other;

    double area() const { return signed_area(ring); }
};

/// Default lane count per road class; the values are configurable upstream.
int default_lanes(RoadClass c);

/// Projection of point p onto the nearest point of a polyline.
struct PolylineHit {
    double distance = 0.0;
    double arc = 0.0; // arc length along the polyline
    Vec2 point;
    std::size_t segment = 0;
};
PolylineHit nearest_on_polyline(const Vec2& p, const std::vector<Vec2>& pts);

/// Shortest path between two positions snapped onto the path network.
/// Returns the walking polyline (starting at `from`, ending at `to`) or
/// nullopt when the endpoints are in different components.
std::optional<std::vector<Vec2>> route_on_paths(const PathNetwork& net,
                                                const Vec2& from, const Vec2& to);

/// Shortest route over road edges between two nodes; edge ids in travel order.
std::optional<std::vector<EdgeId>> route_on_roads(const RoadNetwork& net,
                                                  NodeId from, NodeId to);

double network_walk_distance(const PathNetwork& net, const Vec2& from, const Vec2& to);

} // namespace wams
