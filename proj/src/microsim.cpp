#include "wams/microsim.hpp"

#include <algorithm>
#include <cmath>

namespace wams {

const char* to_string(VehicleType t) {
    switch (t) {
        case VehicleType::Car: return "car";
        case VehicleType::Bus: return "bus";
        case VehicleType::Van: return "van";
        default: return "motorcycle";
    }
}

int capacity(VehicleType t) {
    switch (t) {
        case VehicleType::Car: return 5;
        case VehicleType::Bus: return 30;
        case VehicleType::Van: return 2;
        default: return 1;
    }
}

double body_length(VehicleType t) {
    switch (t) {
        case VehicleType::Car: return 4.5;
        case VehicleType::Bus: return 12.0;
        case VehicleType::Van: return 5.5;
        default: return 2.2;
    }
}

double idm_acceleration(double speed, std::optional<double> leader_gap,
                        double leader_speed, const IdmParams& p) {
    double free = p.a * (1.0 - std::pow(speed / p.v0, p.delta));
    if (!leader_gap) return free;
    double s = *leader_gap;
    if (s <= 0.0) return -p.b_emergency;
    double dv = speed - leader_speed;
    double s_star = p.s0 + speed * p.T + speed * dv / (2.0 * std::sqrt(p.a * p.b));
    s_star = std::max(s_star, p.s0);
    double acc = p.a * (1.0 - std::pow(speed / p.v0, p.delta) - (s_star / s) * (s_star / s));
    return std::max(acc, -p.b_emergency);
}

double idm_equilibrium_gap(double v, const IdmParams& p) {
    return (p.s0 + v * p.T) / std::sqrt(1.0 - std::pow(v / p.v0, p.delta));
}

namespace {

std::vector<Vec2> oriented_shape(const RoadNetwork& roads, const LaneRef& l) {
    std::vector<Vec2> s = roads.edges.at(l.edge).shape;
    if (!l.forward) std::reverse(s.begin(), s.end());
    return s;
}

double lane_offset(const RoadEdge& e) { return e.half_width() - e.lane_width * 0.5; }

} // namespace

double TrafficWorld::lane_length(const LaneRef& l) const {
    return roads->edges.at(l.edge).length();
}

Vec2 TrafficWorld::vehicle_position(const VehicleState& v) const {
    const RoadEdge& e = roads->edges.at(v.lane.edge);
    std::vector<Vec2> s = oriented_shape(*roads, v.lane);
    Vec2 p = polyline_at(s, v.pos);
    // direction at this arc for the sideways lane offset
    double heading = vehicle_heading(v);
    Vec2 dir{std::cos(heading), std::sin(heading)};
    return p + dir.perp_right() * lane_offset(e);
}

double TrafficWorld::vehicle_heading(const VehicleState& v) const {
    std::vector<Vec2> s = oriented_shape(*roads, v.lane);
    double arc = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double d = dist(s[i], s[i + 1]);
        if (v.pos <= arc + d || i + 2 == s.size()) {
            Vec2 dir = (s[i + 1] - s[i]).normalized();
            return std::atan2(dir.y, dir.x);
        }
        arc += d;
    }
    return 0.0;
}

int movement_group(const RoadNetwork& roads, const LaneRef& lane) {
    std::vector<Vec2> s = oriented_shape(roads, lane);
    Vec2 d = s.back() - s[s.size() - 2];
    return std::abs(d.x) >= std::abs(d.y) ? 0 : 1;
}

bool approach_open(const TrafficWorld& w, NodeId junction, const LaneRef& from, double t) {
    if (w.occupied_crossings.count(junction)) return false;
    auto it = w.signals.find(junction);
    if (it == w.signals.end()) return true;
    const SignalPlan& sp = it->second;
    double slot = sp.green + sp.all_red;
    double period = sp.phases * slot;
    double local = std::fmod(t + sp.offset, period);
    if (local < 0) local += period;
    int phase = static_cast<int>(local / slot);
    double within = local - phase * slot;
    return within < sp.green && movement_group(*w.roads, from) % sp.phases == phase;
}

bool insertion_clear(const TrafficWorld& w, const LaneRef& lane, double pos,
                     const IdmParams& p) {
    double need = p.s0 + p.v0 * p.T;
    for (const auto& [id, v] : w.vehicles) {
        if (v.phase == VehiclePhase::Despawned || v.phase == VehiclePhase::Parked) continue;
        if (!(v.lane == lane)) continue;
        double behind = pos - body_length(VehicleType::Car) - v.pos; // v approaching from behind
        if (v.pos <= pos && behind < need) return false;
        double ahead = v.pos - body_length(v.type) - pos;
        if (v.pos > pos && ahead < p.s0) return false;
    }
    return true;
}

std::vector<TrafficEvent> step_traffic(TrafficWorld& w, double dt) {
    std::vector<TrafficEvent> events;

    // pre-step snapshot of the moving/blocking vehicles per lane
    struct Snap {
        std::int64_t id;
        double pos;
        double speed;
        double len;
    };
    std::map<LaneRef, std::vector<Snap>> lanes;
    for (const auto& [id, v] : w.vehicles) {
        if (v.phase == VehiclePhase::Driving || v.phase == VehiclePhase::StoppedAtStop)
            lanes[v.lane].push_back({id, v.pos, v.speed, body_length(v.type)});
    }
    for (auto& [lane, vs] : lanes)
        std::sort(vs.begin(), vs.end(), [](const Snap& a, const Snap& b) {
            return a.pos < b.pos || (a.pos == b.pos && a.id < b.id);
        });

    // pass 1: accelerations from the snapshot (synchronous update)
    for (auto& [id, v] : w.vehicles) {
        if (v.phase != VehiclePhase::Driving) continue;
        double L = w.lane_length(v.lane);
        std::optional<double> gap;
        double leader_speed = 0.0;

        const auto& peers = lanes.at(v.lane);
        for (std::size_t i = 0; i + 1 < peers.size(); ++i) {
            if (peers[i].id == id) {
                const Snap& lead = peers[i + 1];
                gap = lead.pos - lead.len - v.pos;
                leader_speed = lead.speed;
                break;
            }
        }

        auto virtual_stop = [&](double stop_at) {
            double g = stop_at + v.idm.s0 - v.pos; // equilibrium front = stop_at
            if (!gap || g < *gap) {
                gap = g;
                leader_speed = 0.0;
            }
        };
        if (v.stop_pos && v.pos <= *v.stop_pos + 0.5) virtual_stop(*v.stop_pos);

        const RoadEdge& e = w.roads->edges.at(v.lane.edge);
        NodeId end_node = v.lane.forward ? e.to : e.from;
        auto jit = w.roads->junctions.find(end_node);
        if (jit != w.roads->junctions.end()) {
            double stop_line = L - jit->second.radius;
            if (v.pos <= stop_line && !approach_open(w, end_node, v.lane, w.time))
                virtual_stop(stop_line);
        }
        if (v.route.empty() && !v.stop_pos) virtual_stop(L); // park at lane end

        if (gap && *gap <= 0.0)
            events.push_back({w.time, "collision-imminent", id});
        v.accel = idm_acceleration(v.speed, gap, leader_speed, v.idm);
    }

    // pass 2: integrate and handle lane ends / stop snapping
    for (auto& [id, v] : w.vehicles) {
        if (v.phase != VehiclePhase::Driving) continue;
        v.speed = std::max(0.0, v.speed + v.accel * dt);
        // kinematic envelope: slow to turn_speed before a direction change so
        // the lateral lane-offset swing stays inside one tick's motion budget
        if (!v.route.empty()) {
            std::vector<Vec2> cur = oriented_shape(*w.roads, v.lane);
            std::vector<Vec2> nxt = oriented_shape(*w.roads, v.route.front());
            Vec2 d1 = (cur.back() - cur[cur.size() - 2]).normalized();
            Vec2 d2 = (nxt[1] - nxt[0]).normalized();
            if (d1.dot(d2) < std::cos(30.0 * 3.14159265358979 / 180.0)) {
                double remain = std::max(0.0, w.lane_length(v.lane) - v.pos);
                double cap = std::sqrt(v.turn_speed * v.turn_speed +
                                       2.0 * v.idm.b * remain);
                v.speed = std::min(v.speed, cap);
            }
        }
        v.pos += v.speed * dt;
        double L = w.lane_length(v.lane);

        if (v.stop_pos && std::abs(v.pos - *v.stop_pos) < 0.5 && v.speed < 0.1) {
            v.pos = *v.stop_pos;
            v.speed = 0.0;
            v.phase = VehiclePhase::StoppedAtStop;
            events.push_back({w.time, "stopped", id});
            continue;
        }
        // parking at the lane end converges asymptotically; snap like a stop
        if (!v.stop_pos && v.route.empty() && v.pos > L - 0.5 && v.speed < 0.1) {
            v.pos = std::min(v.pos, L);
            v.speed = 0.0;
            v.phase = VehiclePhase::Parked;
            events.push_back({w.time, "parked", id});
            continue;
        }
        if (v.pos >= L) {
            if (v.route.empty()) {
                v.pos = L;
                v.speed = 0.0;
                v.phase = VehiclePhase::Parked;
                events.push_back({w.time, "parked", id});
            } else {
                const RoadEdge& e = w.roads->edges.at(v.lane.edge);
                NodeId end_node = v.lane.forward ? e.to : e.from;
                if (w.roads->junctions.count(end_node) &&
                    !approach_open(w, end_node, v.lane, w.time)) {
                    v.pos = L; // held at the junction entry
                    v.speed = 0.0;
                } else {
                    double carry = v.pos - L;
                    v.lane = v.route.front();
                    v.route.erase(v.route.begin());
                    v.pos = std::min(carry, w.lane_length(v.lane));
                    events.push_back({w.time, "lane-change", id});
                }
            }
        }
    }
    w.time += dt;
    return events;
}

Vec2 walk_step(WalkState& ws, double dt) {
    double total = polyline_length(ws.polyline);
    if (ws.polyline.empty()) {
        ws.done = true;
        return {};
    }
    ws.arc += ws.speed * dt;
    if (ws.arc >= total) {
        ws.arc = total;
        ws.done = true;
    }
    return polyline_at(ws.polyline, ws.arc);
}

std::uint64_t scoot_spawn_count(const FlowModulator& fm, double t, double dt, Rng& rng) {
    int hour = static_cast<int>(std::fmod(t / 3600.0, 24.0));
    if (hour < 0) hour += 24;
    double lambda = fm.base_rate * fm.multipliers[hour] * dt;
    return rng.poisson(lambda);
}

} // namespace wams
