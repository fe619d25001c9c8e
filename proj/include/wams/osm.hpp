#pragma once

#include "wams/geo.hpp"
#include "wams/network.hpp"

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace wams {

struct OsmConfig {
    // Road classes that receive sidewalks when the OSM data does not say.
    std::set<RoadClass> sidewalk_classes{RoadClass::Primary, RoadClass::Secondary,
                                         RoadClass::Residential, RoadClass::Service,
                                         RoadClass::Other};
    double lane_width = 3.2;       // m
    double sidewalk_margin = 1.0;  // sidewalk centerline offset beyond the carriageway, m
    bool generate_sidewalks = true;
};

struct OsmParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OsmParseResult {
    RoadNetwork roads;
    PathNetwork paths;
    std::vector<BuildingFootprint> buildings;
    int utm_zone = 0;
    bool north = true;
    std::vector<std::string> warnings; // rejected ways etc., parse continues
};

/// Parse an OSM XML document into road/path networks and building footprints.
/// Coordinates are projected into the UTM zone of the scene centroid;
/// scenes spanning more than one zone are rejected.
OsmParseResult parse_osm(std::istream& xml, const OsmConfig& cfg = {});
OsmParseResult parse_osm_string(const std::string& xml, const OsmConfig& cfg = {});

/// Sidewalk autogeneration for road edges flagged sidewalk=true: one path
/// segment per side, offset by the lane geometry, joined by crossings at
/// shared road nodes. Called by parse_osm; exposed for procedural cities.
void generate_sidewalks(const RoadNetwork& roads, PathNetwork& paths, const OsmConfig& cfg);

/// Road-graph junction detection (>= 3 incident edges), disc radius from lane geometry.
void detect_junctions(RoadNetwork& roads);

} // namespace wams
