#pragma once

#include "wams/citygen.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wams {

struct BusRoute {
    int route_id = 0;
    std::vector<std::int64_t> stops; // TransferPoint ids, looped in order
    std::int64_t vehicle = -1;
    std::int64_t driver = -1;
    int capacity = 30;
};

struct BusLegChoice {
    int r = 0;      // route index into the routes vector
    int m = 0;      // boarding stop index on the route
    int n = 0;      // alighting stop index
    bool forward = true; // loop direction with fewer intermediate stops
    double walk_cost = 0.0; // walk onto this leg (and off the last leg)
};

struct JourneyConfig {
    double walk_threshold = 1500.0; // direct-walk acceptance, m
    double bus_advantage = 0.8;     // bus wins when its walking < this x direct
    int max_legs = 3;
    double dwell_per_person = 2.0;  // s
    double dwell_min = 5.0;         // s
};

/// Bus-stop selection: argmin over (m, n, r) of straight-line walk costs,
/// extended recursively from each alighting stop up to max_legs. Returns the
/// empty list when no plan beats walking straight to the destination.
std::vector<BusLegChoice> select_bus_legs(const Vec2& start, const Vec2& dest,
                                          const std::vector<BusRoute>& routes,
                                          const std::map<std::int64_t, TransferPoint>& tps,
                                          int max_legs);

/// Total walking distance of a leg plan (start -> first stop -> ... -> dest).
double plan_walk_cost(const Vec2& start, const Vec2& dest,
                      const std::vector<BusLegChoice>& plan,
                      const std::vector<BusRoute>& routes,
                      const std::map<std::int64_t, TransferPoint>& tps);

enum class Mode { Walk, Drive, BusWalk };

/// Vehicle owners drive; others walk within the threshold, else ride the bus
/// when its plan beats direct walking by the advantage factor.
Mode choose_mode(bool owns_vehicle, double direct_walk_dist, double bus_plan_walk,
                 bool bus_plan_exists, const JourneyConfig& cfg);

/// Shared-car drop-off ordering: nearest-next over passenger destinations,
/// the driver's own destination always last. Splits into vehicles of <= 5.
struct CarsharePassenger {
    std::int64_t person = 0;
    Vec2 dest;
};
std::vector<std::vector<CarsharePassenger>>
carshare_plan(const Vec2& origin, const std::vector<CarsharePassenger>& passengers,
              std::int64_t driver);

} // namespace wams
