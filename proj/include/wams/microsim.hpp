#pragma once

#include "wams/network.hpp"
#include "wams/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wams {

enum class VehicleType { Car, Bus, Van, Motorcycle };
const char* to_string(VehicleType t);
int capacity(VehicleType t);
double body_length(VehicleType t);

struct IdmParams {
    double v0 = 13.9;  // desired speed, m/s (~50 km/h)
    double T = 1.5;    // safe time headway, s
    double a = 1.5;    // max acceleration, m/s^2
    double b = 2.0;    // comfortable deceleration, m/s^2
    double s0 = 2.0;   // minimum gap, m
    double delta = 4.0;
    double b_emergency = 9.0; // lower bound on commanded deceleration
};

/// Standard IDM. No leader -> free-road term only. Non-positive gap -> full
/// emergency braking (the caller flags the collision-imminent event).
double idm_acceleration(double speed, std::optional<double> leader_gap,
                        double leader_speed, const IdmParams& p);

/// Closed-form equilibrium gap at steady speed v (dv=0, accel=0).
double idm_equilibrium_gap(double v, const IdmParams& p);

enum class VehiclePhase { Parked, Driving, StoppedAtStop, Despawned };

/// Directed lane: travel along `edge` in shape order (forward) or reversed.
struct LaneRef {
    EdgeId edge = 0;
    bool forward = true;
    auto operator<=>(const LaneRef&) const = default;
};

struct VehicleState {
    std::int64_t id = 0;
    VehicleType type = VehicleType::Car;
    LaneRef lane;
    double pos = 0.0;   // front-bumper arc length along the lane, m
    double speed = 0.0; // m/s
    double accel = 0.0;
    std::vector<LaneRef> route; // remaining lanes after the current one
    std::vector<std::int64_t> passengers;
    VehiclePhase phase = VehiclePhase::Parked;
    std::optional<double> stop_pos; // park here on the current lane when set
    IdmParams idm;
    double turn_speed = 5.0; // speed cap through direction-changing junctions, m/s
};

struct SignalPlan {
    NodeId junction = 0;
    double green = 30.0;   // per phase, s
    double all_red = 5.0;  // inter-phase clearance, s
    double offset = 0.0;
    int phases = 2;        // axis-split movement groups
};

struct TrafficEvent {
    double time = 0.0;
    std::string kind; // collision-imminent | parked | lane-change | despawned
    std::int64_t vehicle = 0;
};

struct FlowModulator {
    NodeId junction = 0;          // periphery junction
    double base_rate = 0.1;       // veh/s
    double multipliers[24] = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1,
                              1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
};

struct TrafficWorld {
    const RoadNetwork* roads = nullptr;
    std::map<std::int64_t, VehicleState> vehicles;
    std::map<NodeId, SignalPlan> signals;
    std::set<NodeId> occupied_crossings; // junctions blocked by pedestrians
    double time = 0.0;

    double lane_length(const LaneRef& l) const;
    /// World position/heading of a vehicle, offset onto its side of the road.
    Vec2 vehicle_position(const VehicleState& v) const;
    double vehicle_heading(const VehicleState& v) const; // radians, CCW from +x
};

/// Movement group of an edge at a junction (axis split: 0 = east-west-ish).
int movement_group(const RoadNetwork& roads, const LaneRef& lane);

/// True when the signal (if any) shows green for this approach at time t and
/// no pedestrian occupies the junction crossing.
bool approach_open(const TrafficWorld& w, NodeId junction, const LaneRef& from, double t);

/// Insertion gap test; true when a vehicle may appear at `pos` on `lane`.
bool insertion_clear(const TrafficWorld& w, const LaneRef& lane, double pos,
                     const IdmParams& p);

/// One synchronous Euler step of every driving vehicle.
std::vector<TrafficEvent> step_traffic(TrafficWorld& w, double dt);

struct WalkState {
    std::vector<Vec2> polyline;
    double arc = 0.0;
    double speed = 1.4; // m/s
    bool done = false;
};

/// Fixed-velocity advance along the polyline; clamps and flags at the end.
Vec2 walk_step(WalkState& ws, double dt);

/// Poisson spawn count for the periphery junction over [t, t+dt).
std::uint64_t scoot_spawn_count(const FlowModulator& fm, double t, double dt, Rng& rng);

} // namespace wams
