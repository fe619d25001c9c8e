#pragma once

#include "wams/network.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wams {

struct HeightRange {
    double min_h = 4.0;
    double max_h = 10.0;
    double area_ref = 400.0; // m^2, floor area at which the class maximum is reached
};

struct CitygenConfig {
    std::map<BuildingClass, HeightRange> heights{
        {BuildingClass::Residential, {4.0, 12.0, 400.0}},
        {BuildingClass::Commercial, {6.0, 30.0, 400.0}},
        {BuildingClass::Industrial, {5.0, 15.0, 400.0}},
        {BuildingClass::Civic, {6.0, 20.0, 400.0}},
        {BuildingClass::Other, {4.0, 10.0, 400.0}},
    };
    double height_jitter = 0.1;       // +/- fraction
    double doorway_width = 1.0;       // minimum wall length carrying a doorway, m
    double max_probe_length = 30.0;   // probe discard length, m
    double road_search_beyond = 20.0; // extension past the gateway looking for a lane, m
};

struct TransferPoint {
    std::int64_t id = 0;
    Vec2 wait_point;            // on the sidewalk
    Vec2 stop_point;            // on the adjacent road lane centerline
    enum class Source { BuildingProbe, SegmentMidpoint } source = Source::SegmentMidpoint;
    EdgeId road_edge = 0;       // lane the stop point lies on
    double road_arc = 0.0;      // arc length of the stop point along the edge shape
    bool forward = true;        // travel direction of the lane the stop sits on
    int path_component = -1;    // component of the sidewalk it is reachable from
};

struct Building {
    BuildingFootprint footprint;
    double height = 0.0;
    Vec2 doorway;
    Vec2 gateway;
    std::vector<Vec2> footpath; // doorway -> gateway
    std::optional<Vec2> stop_point;
    std::optional<std::int64_t> transfer_id; // linked transfer point
    bool routable = false;
};

struct FootpathResult {
    Vec2 doorway;
    Vec2 gateway;
    std::vector<Vec2> footpath;
    std::optional<Vec2> stop_point;
    EdgeId stop_edge = 0;
    double stop_arc = 0.0;
    EdgeId gateway_path_edge = 0;
};

/// Height from class range, floor area and a seeded jitter. Deterministic for
/// a given (seed, building id) regardless of generation order.
double extrude_building(const BuildingFootprint& fp, const CitygenConfig& cfg,
                        std::uint64_t scenario_seed);

/// Perpendicular wall probes; shortest surviving probe becomes the footpath.
/// Returns nullopt when the building is unreachable.
std::optional<FootpathResult> generate_footpath(const BuildingFootprint& b,
                                                const std::vector<BuildingFootprint>& all,
                                                const PathNetwork& paths,
                                                const RoadNetwork& roads,
                                                const CitygenConfig& cfg = {});

/// One transfer point per sidewalked road polyline segment midpoint,
/// skipping midpoints that fall inside a junction disc.
std::vector<TransferPoint> generate_transfer_points(const RoadNetwork& roads,
                                                    const PathNetwork& paths,
                                                    double sidewalk_offset_margin = 1.0);

/// Nearest transfer point by Euclidean distance; ties break to the lowest id.
const TransferPoint& link_gateway(const Vec2& gateway,
                                  const std::vector<TransferPoint>& tps);

/// Full city assembly: heights, footpaths, transfer points and linkage.
struct CityBuildResult {
    std::vector<Building> buildings;
    std::vector<TransferPoint> transfer_points;
    std::vector<std::string> log; // unreachable buildings etc.
};
CityBuildResult build_city(const std::vector<BuildingFootprint>& footprints,
                           const PathNetwork& paths, const RoadNetwork& roads,
                           const CitygenConfig& cfg, std::uint64_t seed);

} // namespace wams
