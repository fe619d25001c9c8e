#pragma once

#include "wams/network.hpp"
#include "wams/osm.hpp"

#include <cstdint>

namespace wams {

/// Procedural rectangular block city used by the desk-scale presets. Roads
/// form a (rows+1) x (cols+1) grid of residential streets; buildings line the
/// inside of each block facing the sidewalks.
struct GridCityConfig {
    int rows = 6;
    int cols = 6;
    double block = 120.0;           // road-centerline pitch, m
    double origin_easting = 400000; // UTM anchor of the south-west grid node
    double origin_northing = 5900000;
    int utm_zone = 30;
    int per_long_side = 2;          // buildings on the north/south block sides
    int per_short_side = 1;         // buildings on the east/west block sides
    double setback = 4.0;           // front wall distance behind the sidewalk, m
    double min_side = 10.0;         // footprint edge range, m
    double max_side = 16.0;
    bool center_buildings = false;  // drop one far-interior building per block
};

struct GridCity {
    RoadNetwork roads;
    PathNetwork paths;
    std::vector<BuildingFootprint> buildings;
    int utm_zone = 30;
    bool north = true;
};

GridCity generate_grid_city(const GridCityConfig& cfg, std::uint64_t seed);

} // namespace wams
